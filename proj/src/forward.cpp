#include "ttc/forward.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "ttc/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ttc {

namespace detail {

Matrix history_matrix(const Matrix& initial, const HermitianOperator& h,
                      const CollapseFamily& family, const std::vector<double>& times,
                      const std::vector<int>& outcomes, double t) {
    Matrix x = initial;
    double t_prev = times.front();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const double ti = times[i + 1];
        if (!(ti < t)) break;
        const Matrix u = propagator(h, ti - t_prev).matrix();
        x = u * x * u.adjoint();
        const int a = outcomes[i];
        const Matrix& l = family.op(a).matrix();
        x = family.weight(a) * (l * x * l);
        t_prev = ti;
    }
    const Matrix u = propagator(h, t - t_prev).matrix();
    return u * x * u.adjoint();
}

}  // namespace detail

std::vector<double> collapse_distribution(const DensityOperator& rho, const CollapseFamily& family,
                                          const Tolerances& tol) {
    if (rho.role() != DensityRole::state) {
        throw ValidationError("collapse_distribution: rho must have role=state");
    }
    detail::require_same_space(rho.space(), family.space(), "collapse_distribution");
    std::vector<double> p(static_cast<std::size_t>(family.size()));
    for (int a = 0; a < family.size(); ++a) {
        const Matrix& l = family.op(a).matrix();
        const Complex tr = trace_product(l * rho.matrix(), l);
        if (std::abs(tr.imag()) > tol.imag) {
            std::ostringstream os;
            os << "collapse_distribution: imaginary part " << tr.imag() << " in outcome " << a;
            throw ModelValidityError(os.str());
        }
        double pa = family.weight(a) * tr.real();
        if (pa < -1e-10) {
            std::ostringstream os;
            os << "collapse_distribution: negative probability " << pa << " for outcome " << a;
            throw ModelValidityError(os.str());
        }
        p[static_cast<std::size_t>(a)] = std::max(pa, 0.0);
    }
    return p;
}

DensityOperator history_operator(const TwoTimeModel& model, const CollapseRecord& record,
                                 double t) {
    const auto& times = model.schedule()->times();
    if (!(t >= times.front() && t <= times.back())) {
        std::ostringstream os;
        os << "history_operator: t = " << t << " outside [" << times.front() << ", "
           << times.back() << "]";
        throw ValidationError(os.str());
    }
    Matrix pi = detail::history_matrix(model.rho_i().matrix(), model.hamiltonian(), model.family(),
                                       times, record.outcomes(), t);
    return DensityOperator(HermitianOperator((pi + pi.adjoint()) / 2.0, model.space(), model.tol()),
                           DensityRole::unnormalized_history, model.tol());
}

DensityOperator state_at(const TwoTimeModel& model, const CollapseRecord& record, double t) {
    return normalize_history(history_operator(model, record, t), model.tol()).first;
}

TrajectoryOutput sample_trajectory(const TwoTimeModel& model, std::uint64_t seed,
                                   bool keep_states) {
    const Tolerances& tol = model.tol();
    std::mt19937_64 gen(seed);
    const auto& times = model.schedule()->times();
    const CollapseFamily& family = model.family();
    const int events = model.schedule()->event_count();

    Matrix rho = model.rho_i().matrix();
    std::vector<int> outcomes;
    outcomes.reserve(static_cast<std::size_t>(events));
    std::vector<DensityOperator> states;
    double weight_running = 1.0;

    double t_prev = times.front();
    for (int i = 1; i <= events; ++i) {
        const double ti = times[static_cast<std::size_t>(i)];
        const Matrix u = propagator(model.hamiltonian(), ti - t_prev).matrix();
        rho = u * rho * u.adjoint();

        DensityOperator state(HermitianOperator((rho + rho.adjoint()) / 2.0, model.space(), tol),
                              DensityRole::state, tol);
        const std::vector<double> p = collapse_distribution(state, family, tol);
        double total = 0.0;
        for (double pa : p) total += pa;
        if (total <= tol.zero) {
            throw ModelValidityError("sample_trajectory: zero-probability dead end at event " +
                                     std::to_string(i));
        }

        // Inverse CDF over ascending outcome indices; one fixed summation
        // order keeps draws identical across platforms and thread counts.
        const double u01 = uniform01(gen) * total;
        int drawn = -1;
        double cdf = 0.0;
        for (int a = 0; a < family.size(); ++a) {
            cdf += p[static_cast<std::size_t>(a)];
            if (u01 < cdf) {
                drawn = a;
                break;
            }
        }
        if (drawn < 0) {
            // roundoff pushed u01 to the top of the CDF; take the last live branch
            for (int a = family.size() - 1; a >= 0; --a) {
                if (p[static_cast<std::size_t>(a)] > 0.0) {
                    drawn = a;
                    break;
                }
            }
        }

        const Matrix& l = family.op(drawn).matrix();
        rho = family.weight(drawn) * (l * rho * l);
        const double branch = rho.trace().real();
        if (branch <= tol.zero) {
            throw ModelValidityError("sample_trajectory: drawn branch has zero weight");
        }
        weight_running *= branch;
        rho /= branch;
        outcomes.push_back(drawn);
        if (keep_states) {
            states.emplace_back(HermitianOperator((rho + rho.adjoint()) / 2.0, model.space(), tol),
                                DensityRole::state, tol);
        }
        t_prev = ti;
    }

    CollapseRecord record = model.make_record(std::move(outcomes));
    const double weight =
        history_operator(model, record, times.back()).matrix().trace().real();
    if (std::abs(weight - weight_running) > 1e-9 * std::max(1.0, std::abs(weight))) {
        std::ostringstream os;
        os << "sample_trajectory: weight cross-check failed (incremental " << weight_running
           << " vs history " << weight << ")";
        throw NumericalError(os.str());
    }

    TrajectoryOutput out{std::move(record), weight, seed, std::nullopt};
    if (keep_states) out.states = std::move(states);
    return out;
}

std::vector<TrajectoryOutput> sample_batch(const TwoTimeModel& model, std::uint64_t base_seed,
                                           int count) {
    if (count < 0) throw ValidationError("sample_batch: negative count");
    std::vector<std::optional<TrajectoryOutput>> slots(static_cast<std::size_t>(count));
    std::exception_ptr err = nullptr;
    // exceptions must not escape the parallel region
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) {
        try {
            slots[static_cast<std::size_t>(i)] =
                sample_trajectory(model, derive_seed(base_seed, static_cast<std::uint64_t>(i)));
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    std::vector<TrajectoryOutput> out;
    out.reserve(static_cast<std::size_t>(count));
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

namespace {

void append_double(std::string& s, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    s.append(buf, res.ptr);
}

}  // namespace

std::string trajectory_csv(const std::vector<TrajectoryOutput>& batch) {
    std::string csv = "seed,outcomes,weight\n";
    for (const auto& t : batch) {
        csv += std::to_string(t.seed);
        csv += ',';
        const auto& outs = t.record.outcomes();
        for (std::size_t i = 0; i < outs.size(); ++i) {
            if (i) csv += ';';
            csv += std::to_string(outs[i]);
        }
        csv += ',';
        append_double(csv, t.weight);
        csv += '\n';
    }
    return csv;
}

}  // namespace ttc
