#pragma once

// Sample-parallel Monte Carlo driver with a deterministic reduction.
//
// Every sample writes into its own row of a slot matrix; reductions run over
// rows in a fixed pairwise order, so Serial and Parallel results are
// bit-identical for any thread count.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace seelab {

enum class ExecPolicy { Serial, Parallel };

/// SEE_THREADS if set to a positive integer, else the OpenMP default.
int thread_count();

/// Per-sample result rows: data[s * width + j].
struct McSlots {
    std::size_t samples = 0;
    std::size_t width = 0;
    std::vector<double> data;

    double at(std::size_t s, std::size_t j) const { return data[s * width + j]; }
    std::vector<double> column(std::size_t j) const;
};

using SampleKernel = std::function<void(std::size_t sample, double* row)>;

/// Runs kernel(s, row_s) for s < samples. An exception from any sample is
/// rethrown after the loop (the one with the smallest sample index).
McSlots run_samples(std::size_t samples, std::size_t width, ExecPolicy policy, const SampleKernel& kernel);

/// Pairwise (cascade) summation in a fixed order.
double pairwise_sum(std::span<const double> v);

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and its standard error (sample standard deviation / sqrt(n)).
MeanStderr mean_stderr(std::span<const double> v);

/// Unbiased sample variance and the standard error of that estimate
/// (delta method with the fourth central moment).
MeanStderr variance_stderr(std::span<const double> v);

}  // namespace seelab
