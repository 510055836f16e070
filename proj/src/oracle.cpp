#include "ttc/oracle.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "ttc/errors.hpp"
#include "ttc/rng.hpp"

namespace ttc::oracle {

namespace {

/// History chain written out longhand: start at the initial operator, and
/// for each gap build the propagator anew, evolve, then apply the event.
Matrix chained_history(const TwoTimeModel& model, const Matrix& initial,
                       const std::vector<double>& times, const std::vector<int>& outcomes) {
    const CollapseFamily& fam = model.family();
    const int events = static_cast<int>(outcomes.size());
    Matrix pi = initial;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        Matrix u = propagator(model.hamiltonian(), times[k + 1] - times[k], model.tol()).matrix();
        pi = u * pi * u.adjoint();
        if (static_cast<int>(k) < events) {
            int a = outcomes[k];
            if (a < 0 || a >= fam.size())
                throw ValidationError("record outcome index out of range");
            const Matrix& l = fam.op(a).matrix();
            pi = fam.weight(a) * (l * pi * l);
        }
    }
    return pi;
}

double boundary_trace(const TwoTimeModel& model, const Matrix& boundary, const Matrix& pi,
                      const char* what) {
    Complex value = (boundary * pi).trace();
    if (std::abs(value.imag()) > model.tol().imag) {
        std::ostringstream os;
        os << what << " has imaginary part " << value.imag();
        throw NumericalError(os.str());
    }
    double re = value.real();
    if (re < -1e-12) {
        std::ostringstream os;
        os << what << " is negative (" << re << ")";
        throw ModelValidityError(os.str());
    }
    return re < 0.0 ? 0.0 : re;
}

}  // namespace

std::vector<int> ExactDistribution::decode(std::uint64_t flat) const {
    std::vector<int> outcomes(static_cast<std::size_t>(event_count));
    for (int i = event_count - 1; i >= 0; --i) {
        outcomes[static_cast<std::size_t>(i)] =
            static_cast<int>(flat % static_cast<std::uint64_t>(grid_size));
        flat /= static_cast<std::uint64_t>(grid_size);
    }
    return outcomes;
}

std::uint64_t ExactDistribution::encode(const std::vector<int>& outcomes) const {
    std::uint64_t flat = 0;
    for (int z : outcomes)
        flat = flat * static_cast<std::uint64_t>(grid_size) + static_cast<std::uint64_t>(z);
    return flat;
}

double record_weight(const TwoTimeModel& model, const std::vector<int>& outcomes) {
    if (static_cast<int>(outcomes.size()) != model.schedule()->event_count())
        throw ValidationError("record length does not match the event schedule");
    Matrix pi_n = chained_history(model, model.rho_i().matrix(), model.schedule()->times(),
                                  outcomes);
    return boundary_trace(model, model.rho_f().matrix(), pi_n, "record weight");
}

double backward_record_weight(const TwoTimeModel& model, const std::vector<int>& outcomes) {
    if (static_cast<int>(outcomes.size()) != model.schedule()->event_count())
        throw ValidationError("record length does not match the event schedule");
    const auto& times = model.schedule()->times();
    std::vector<double> reversed_times(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        reversed_times[i] = -times[times.size() - 1 - i];
    std::vector<int> reversed_outcomes(outcomes.rbegin(), outcomes.rend());
    Matrix rho_f_conj = model.rho_f().matrix().conjugate();
    Matrix pibar_n = chained_history(model, rho_f_conj, reversed_times, reversed_outcomes);
    Matrix rho_i_conj = model.rho_i().matrix().conjugate();
    return boundary_trace(model, rho_i_conj, pibar_n, "backward record weight");
}

ExactDistribution enumerate_records(const TwoTimeModel& model, std::uint64_t cap) {
    const int m = model.family().size();
    const int events = model.schedule()->event_count();

    std::uint64_t total = 1;
    for (int i = 0; i < events; ++i) {
        if (total > cap / static_cast<std::uint64_t>(m) + 1) {
            total = cap + 1;
            break;
        }
        total *= static_cast<std::uint64_t>(m);
    }
    if (total > cap) {
        std::ostringstream os;
        os << "record space " << m << "^" << events
           << " exceeds the enumeration cap of " << cap
           << "; use Monte Carlo estimation instead";
        throw CapacityError(os.str());
    }

    ExactDistribution dist;
    dist.event_count = events;
    dist.grid_size = m;
    dist.weights.resize(static_cast<std::size_t>(total));
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        dist.weights[static_cast<std::size_t>(flat)] =
            record_weight(model, dist.decode(flat));
    }
    double denom = 0.0;
    for (double w : dist.weights) denom += w;
    dist.denominator = denom;
    dist.probabilities.resize(dist.weights.size());
    if (denom > model.tol().zero) {
        for (std::size_t i = 0; i < dist.weights.size(); ++i)
            dist.probabilities[i] = dist.weights[i] / denom;
    }
    return dist;
}

FitReport compare_empirical(const ExactDistribution& exact,
                            const std::vector<TrajectoryOutput>& batch) {
    FitReport report;
    report.samples = batch.size();
    if (batch.empty()) throw ValidationError("empty sample batch");

    std::vector<std::uint64_t> counts(exact.weights.size(), 0);
    for (const TrajectoryOutput& t : batch) {
        std::uint64_t flat = exact.encode(t.record.outcomes());
        if (flat >= exact.size()) throw ValidationError("sampled record outside the table");
        ++counts[static_cast<std::size_t>(flat)];
    }

    const double n = static_cast<double>(batch.size());
    double tv = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        tv += std::abs(static_cast<double>(counts[i]) / n - exact.probabilities[i]);
    report.tv_distance = 0.5 * tv;

    // Pool consecutive records until each bin expects at least 5 samples;
    // a trailing underfull bin is merged into its predecessor.
    std::vector<std::pair<double, double>> bins;  // (observed, expected)
    double obs = 0.0, expd = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        obs += static_cast<double>(counts[i]);
        expd += exact.probabilities[i] * n;
        if (expd >= 5.0) {
            bins.emplace_back(obs, expd);
            obs = expd = 0.0;
        }
    }
    if (expd > 0.0 || obs > 0.0) {
        if (!bins.empty()) {
            bins.back().first += obs;
            bins.back().second += expd;
        } else {
            bins.emplace_back(obs, expd);
        }
    }
    double chi2 = 0.0;
    for (const auto& [o, e] : bins) {
        if (e > 0.0) chi2 += (o - e) * (o - e) / e;
    }
    report.chi2 = chi2;
    report.dof = static_cast<int>(bins.size()) - 1;
    return report;
}

McEstimate estimate_denominator(const TwoTimeModel& model, std::uint64_t seed, int samples) {
    if (samples <= 0) throw ValidationError("sample count must be positive");
    McEstimate est;
    est.samples = static_cast<std::uint64_t>(samples);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < samples; ++i) {
        TrajectoryOutput traj = sample_trajectory(model, derive_seed(seed, i));
        Matrix pi_n = chained_history(model, model.rho_i().matrix(),
                                      model.schedule()->times(), traj.record.outcomes());
        double tr_pi = pi_n.trace().real();
        if (tr_pi <= model.tol().zero)
            throw ZeroWeightError("sampled record has vanishing forward weight");
        double v = boundary_trace(model, model.rho_f().matrix(), pi_n,
                                  "denominator sample") /
                   tr_pi;
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(samples);
    est.value = sum / n;
    double variance = samples > 1 ? (sumsq - sum * sum / n) / (n - 1.0) : 0.0;
    if (variance < 0.0) variance = 0.0;
    est.stderror = std::sqrt(variance / n);
    return est;
}

}  // namespace ttc::oracle
