#include "seelab/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>

#include <omp.h>

namespace seelab {

int thread_count() {
    if (const char* env = std::getenv("SEE_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
            // Fall through to the OpenMP default.
        }
    }
    return omp_get_max_threads();
}

std::vector<double> McSlots::column(std::size_t j) const {
    std::vector<double> out(samples);
    for (std::size_t s = 0; s < samples; ++s) out[s] = at(s, j);
    return out;
}

McSlots run_samples(std::size_t samples, std::size_t width, ExecPolicy policy, const SampleKernel& kernel) {
    McSlots slots{samples, width, std::vector<double>(samples * width, 0.0)};
    std::vector<std::exception_ptr> errors(samples);
    const long long n = static_cast<long long>(samples);

    auto body = [&](long long s) {
        try {
            kernel(static_cast<std::size_t>(s), slots.data.data() + static_cast<std::size_t>(s) * width);
        } catch (...) {
            errors[static_cast<std::size_t>(s)] = std::current_exception();
        }
    };

    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
        for (long long s = 0; s < n; ++s) body(s);
    } else {
        for (long long s = 0; s < n; ++s) body(s);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return slots;
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

MeanStderr mean_stderr(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    if (v.empty()) return {};
    double mean = pairwise_sum(v) / n;
    if (v.size() < 2) return {mean, 0.0};
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
    double var = pairwise_sum(sq) / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

MeanStderr variance_stderr(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    if (v.size() < 2) return {};
    double mean = pairwise_sum(v) / n;
    std::vector<double> d2(v.size()), d4(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double d = v[i] - mean;
        d2[i] = d * d;
        d4[i] = d2[i] * d2[i];
    }
    double m2 = pairwise_sum(d2) / n;
    double m4 = pairwise_sum(d4) / n;
    double var = m2 * n / (n - 1.0);
    return {var, std::sqrt(std::max(0.0, m4 - m2 * m2) / n)};
}

}  // namespace seelab
