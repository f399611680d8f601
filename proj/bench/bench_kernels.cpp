// Times the OpenMP kernels against their serial reference implementations and
// verifies that both produce identical results.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fcikit/bootstrap.hpp"
#include "fcikit/sem.hpp"
#include "fcikit/stats.hpp"

using namespace fcikit;

namespace {

template <typename F>
double time_s(F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

void report(const char* name, double serial_s, double parallel_s, bool equal) {
    std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name,
                serial_s, parallel_s, serial_s / parallel_s,
                equal ? "results identical" : "RESULTS DIFFER");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    {
        const SemModel model = random_sem(16, 2, 3.0, 1);
        const Dataset data = sample(model, 200000, 2);
        CorrelationMatrix serial = correlation_matrix_serial(data);
        CorrelationMatrix parallel = correlation_matrix(data);
        const double ts = time_s([&] { serial = correlation_matrix_serial(data); });
        const double tp = time_s([&] { parallel = correlation_matrix(data); });
        bool equal = serial.dim() == parallel.dim();
        for (int i = 0; i < serial.dim() && equal; ++i)
            for (int j = 0; j < serial.dim() && equal; ++j)
                equal = serial(i, j) == parallel(i, j);
        report("correlation 200k x 16", ts, tp, equal);
    }

    {
        const SemModel model = random_sem(8, 1, 1.8, 3);
        const Dataset data = sample(model, 4000, 4);
        const int B = 32;
        bootstrap_fci_serial(data, data.names(), {}, {}, 2, 5);  // warm-up
        std::string serial_csv, parallel_csv;
        const double ts = time_s([&] {
            serial_csv = bootstrap_table_csv(
                bootstrap_fci_serial(data, data.names(), {}, {}, B, 5));
        });
        const double tp = time_s([&] {
            parallel_csv =
                bootstrap_table_csv(bootstrap_fci(data, data.names(), {}, {}, B, 5));
        });
        report("bootstrap 4k x 8, B=32", ts, tp, serial_csv == parallel_csv);
    }
    return 0;
}
