// Compares the OpenMP-parallel engine against the serial reference
// implementation on identical workloads and verifies they agree while
// timing both. Build target: bench_compare (run via `make benchmark`).

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "ttc/forward.hpp"
#include "ttc/io.hpp"
#include "ttc/oracle.hpp"
#include "ttc/rng.hpp"
#include "ttc/twotime.hpp"

using namespace ttc;

namespace {

double time_once(const std::function<void()>& work) {
    auto start = std::chrono::steady_clock::now();
    work();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

TwoTimeModel widened_chain(const std::string& fixture_dir, int events) {
    TwoTimeModel base = io::load_model(fixture_dir + "/grw_chain.json");
    std::vector<double> times;
    for (int i = 0; i <= events + 1; ++i) times.push_back(0.35 * i);
    return TwoTimeModel(base.space(), base.hamiltonian(), base.family(),
                        std::make_shared<const EventSchedule>(std::move(times)), base.rho_i(),
                        base.rho_f(), base.tol());
}

}  // namespace

int main(int argc, char** argv) {
    std::string fixture_dir = TTC_FIXTURE_DIR;
    if (argc > 1) fixture_dir = argv[1];

    std::cout << "threads available: " << omp_get_max_threads() << "\n\n";

    // --- exhaustive enumeration: 41^3 = 68921 records on a 5-level chain ---
    TwoTimeModel chain = widened_chain(fixture_dir, 3);

    oracle::ExactDistribution reference;
    double t_serial = time_once([&] { reference = oracle::enumerate_records(chain); });

    TwoTimeEngine engine(chain);
    const RecordTable* table = nullptr;
    double t_parallel = time_once([&] { table = &engine.table(); });

    double worst = std::abs(reference.denominator - table->denominator);
    for (std::uint64_t i = 0; i < reference.size(); ++i) {
        worst = std::max(worst, std::abs(reference.weights[static_cast<std::size_t>(i)] -
                                         table->weights[static_cast<std::size_t>(i)]));
    }

    std::cout << "enumerate " << reference.size() << " records (41 outcomes, 3 events)\n";
    std::cout << "  serial reference: " << t_serial << " s\n";
    std::cout << "  parallel engine:  " << t_parallel << " s  (speedup "
              << t_serial / t_parallel << "x)\n";
    std::cout << "  max |difference|: " << worst << "\n\n";

    // --- trajectory sampling: one-at-a-time loop vs parallel batch ---------
    TwoTimeModel two = io::load_model(fixture_dir + "/qubit_twoevent.json");
    const int n = 20000;

    std::vector<TrajectoryOutput> serial_batch;
    serial_batch.reserve(n);
    double t_loop = time_once([&] {
        for (int i = 0; i < n; ++i)
            serial_batch.push_back(sample_trajectory(two, derive_seed(9000ull, i)));
    });

    std::vector<TrajectoryOutput> parallel_batch;
    double t_batch = time_once([&] { parallel_batch = sample_batch(two, 9000ull, n); });

    bool identical = trajectory_csv(serial_batch) == trajectory_csv(parallel_batch);

    std::cout << "sample " << n << " trajectories (2-event qubit)\n";
    std::cout << "  serial loop:     " << t_loop << " s\n";
    std::cout << "  parallel batch:  " << t_batch << " s  (speedup " << t_loop / t_batch
              << "x)\n";
    std::cout << "  identical records: " << (identical ? "yes" : "NO") << "\n";

    if (worst > 1e-10 || !identical) {
        std::cerr << "benchmark consistency check failed\n";
        return 1;
    }
    return 0;
}
