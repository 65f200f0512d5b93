#pragma once

#include <bqd/space.hpp>
#include <bqd/sobol.hpp>
#include <bqd/kernels.hpp>
#include <bqd/nelder_mead.hpp>
#include <bqd/gp.hpp>
#include <bqd/archive.hpp>
#include <bqd/problem.hpp>
#include <bqd/map_elites.hpp>
#include <bqd/bayesian_qd.hpp>
#include <bqd/benchmarks.hpp>
#include <bqd/harness.hpp>
#include <bqd/config.hpp>
