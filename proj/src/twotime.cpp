#include "ttc/twotime.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <sstream>
#include <utility>

#include "ttc/errors.hpp"

namespace ttc {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<double> normalized_or_throw(std::vector<double> numerators, double zero_tol,
                                        const char* what) {
    double total = 0.0;
    for (double v : numerators) total += v;
    if (total <= zero_tol) {
        std::ostringstream os;
        os << what << ": all outcome weights vanish (total " << total
           << "); the conditioning prefix is incompatible with the boundaries";
        throw ZeroWeightError(os.str());
    }
    for (double& v : numerators) v /= total;
    return numerators;
}

}  // namespace

std::vector<int> RecordTable::decode(std::uint64_t flat) const {
    std::vector<int> outcomes(static_cast<std::size_t>(event_count));
    for (int i = event_count - 1; i >= 0; --i) {
        outcomes[static_cast<std::size_t>(i)] =
            static_cast<int>(flat % static_cast<std::uint64_t>(grid_size));
        flat /= static_cast<std::uint64_t>(grid_size);
    }
    return outcomes;
}

std::uint64_t RecordTable::encode(const std::vector<int>& outcomes) const {
    std::uint64_t flat = 0;
    for (int z : outcomes)
        flat = flat * static_cast<std::uint64_t>(grid_size) + static_cast<std::uint64_t>(z);
    return flat;
}

std::uint64_t checked_record_space(int grid_size, int events, std::uint64_t cap) {
    std::uint64_t total = 1;
    for (int i = 0; i < events; ++i) {
        if (total > cap / static_cast<std::uint64_t>(grid_size) + 1) {
            total = cap + 1;
            break;
        }
        total *= static_cast<std::uint64_t>(grid_size);
    }
    if (total > cap) {
        std::ostringstream os;
        os << "record space " << grid_size << "^" << events
           << " exceeds the exhaustive enumeration cap of " << cap
           << "; use Monte Carlo estimation instead";
        throw CapacityError(os.str());
    }
    return total;
}

std::string direction_name(Direction d) {
    return d == Direction::forward ? "forward" : "backward";
}

TwoTimeEngine::TwoTimeEngine(TwoTimeModel model) : model_(std::move(model)) {
    const auto& times = model_.schedule()->times();
    const std::size_t n = times.size() - 1;
    reversed_times_.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) reversed_times_[i] = -times[n - i];
    gap_unitaries_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        gap_unitaries_.push_back(
            propagator(model_.hamiltonian(), times[i + 1] - times[i], model_.tol()).matrix());
    }
    rho_f_conj_ = model_.rho_f().matrix().conjugate();
    rho_i_conj_ = model_.rho_i().matrix().conjugate();
}

double TwoTimeEngine::real_probability_trace(const Complex& value, const char* what) const {
    const Tolerances& tol = model_.tol();
    if (std::abs(value.imag()) > tol.imag) {
        std::ostringstream os;
        os << what << " has imaginary part " << value.imag() << " beyond tolerance "
           << tol.imag;
        throw NumericalError(os.str());
    }
    double re = value.real();
    if (re < -1e-12) {
        std::ostringstream os;
        os << what << " is negative (" << re << "); model operators violate positivity";
        throw ModelValidityError(os.str());
    }
    return re < 0.0 ? 0.0 : re;
}

void TwoTimeEngine::require_event_index(int j) const {
    const int k = model_.schedule()->event_count();
    if (j < 1 || j > k) {
        std::ostringstream os;
        os << "event index " << j << " outside [1, " << k << "]";
        throw ValidationError(os.str());
    }
}

double TwoTimeEngine::joint_record_weight(const CollapseRecord& record) const {
    Matrix pi_n = detail::history_matrix(model_.rho_i().matrix(), model_.hamiltonian(),
                                         model_.family(), model_.schedule()->times(),
                                         record.outcomes(), model_.schedule()->tn());
    Complex w = (model_.rho_f().matrix() * pi_n).trace();
    return real_probability_trace(w, "joint record weight tr[rho_F pi_n]");
}

const RecordTable& TwoTimeEngine::table() const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (table_) return *table_;

    const int m = model_.family().size();
    const int events = model_.schedule()->event_count();
    const std::uint64_t total = checked_record_space(m, events);

    RecordTable table;
    table.event_count = events;
    table.grid_size = m;
    table.weights.assign(static_cast<std::size_t>(total), 0.0);

    const CollapseFamily& fam = model_.family();
    const Matrix& rho_f = model_.rho_f().matrix();
    const Matrix& last_gap = gap_unitaries_.back();

    // Depth-first walk sharing history prefixes; leaves land at consecutive
    // flat indices, so each leading-outcome branch owns a disjoint slice.
    auto walk = [&](auto&& self, const Matrix& pi, int applied, std::uint64_t base,
                    double& partial) -> void {
        if (applied == events) {
            Matrix pi_n = last_gap * pi * last_gap.adjoint();
            double w = real_probability_trace((rho_f * pi_n).trace(),
                                              "joint record weight tr[rho_F pi_n]");
            table.weights[static_cast<std::size_t>(base)] = w;
            partial += w;
            return;
        }
        Matrix evolved = gap_unitaries_[static_cast<std::size_t>(applied)] * pi *
                         gap_unitaries_[static_cast<std::size_t>(applied)].adjoint();
        for (int a = 0; a < m; ++a) {
            Matrix child = fam.weight(a) * (fam.op(a).matrix() * evolved * fam.op(a).matrix());
            self(self, child, applied + 1,
                 base * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(a), partial);
        }
    };

    if (events == 0) {
        double partial = 0.0;
        walk(walk, model_.rho_i().matrix(), 0, 0, partial);
        table.denominator = partial;
    } else {
        // Parallel over the leading outcome; per-branch sums are combined in
        // index order afterwards so the result is thread-count independent.
        std::vector<double> branch_sums(static_cast<std::size_t>(m), 0.0);
        Matrix evolved =
            gap_unitaries_[0] * model_.rho_i().matrix() * gap_unitaries_[0].adjoint();
        std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(static)
        for (int a = 0; a < m; ++a) {
            try {
                Matrix child =
                    fam.weight(a) * (fam.op(a).matrix() * evolved * fam.op(a).matrix());
                walk(walk, child, 1, static_cast<std::uint64_t>(a),
                     branch_sums[static_cast<std::size_t>(a)]);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        double denom = 0.0;
        for (double s : branch_sums) denom += s;
        table.denominator = denom;
    }

    table.probabilities.resize(table.weights.size());
    if (table.denominator > model_.tol().zero) {
        for (std::size_t i = 0; i < table.weights.size(); ++i)
            table.probabilities[i] = table.weights[i] / table.denominator;
    }
    table_ = std::move(table);
    return *table_;
}

double TwoTimeEngine::denominator() const { return table().denominator; }

double TwoTimeEngine::record_probability(const CollapseRecord& record) const {
    const RecordTable& t = table();
    if (t.denominator <= model_.tol().zero) {
        std::ostringstream os;
        os << "all records have zero weight (denominator " << t.denominator
           << "): boundary conditions rho_I, rho_F are incompatible";
        throw ModelValidityError(os.str());
    }
    return t.weights[static_cast<std::size_t>(t.encode(record.outcomes()))] / t.denominator;
}

DensityOperator TwoTimeEngine::backward_history(const CollapseRecord& record,
                                                double t_bar) const {
    if (!(t_bar >= reversed_times_.front() && t_bar <= reversed_times_.back())) {
        std::ostringstream os;
        os << "backward_history: t_bar = " << t_bar << " outside [" << reversed_times_.front()
           << ", " << reversed_times_.back() << "]";
        throw ValidationError(os.str());
    }
    CollapseRecord reversed = reverse_record(record, model_.family().size());
    Matrix pibar = detail::history_matrix(rho_f_conj_, model_.hamiltonian(), model_.family(),
                                          reversed_times_, reversed.outcomes(), t_bar);
    return DensityOperator(
        HermitianOperator((pibar + pibar.adjoint()) / 2.0, model_.space(), model_.tol()),
        DensityRole::unnormalized_history, model_.tol());
}

double TwoTimeEngine::time_symmetry_residual(const CollapseRecord& record) const {
    double forward_weight = joint_record_weight(record);
    Matrix pibar_n = backward_history(record, reversed_times_.back()).matrix();
    double backward_weight = real_probability_trace(
        (rho_i_conj_ * pibar_n).trace(), "backward record weight tr[conj(rho_I) pibar_n]");
    return std::abs(forward_weight - backward_weight);
}

Matrix TwoTimeEngine::forward_prefix_matrix(const std::vector<int>& prefix) const {
    const std::size_t j = prefix.size() + 1;
    return detail::history_matrix(model_.rho_i().matrix(), model_.hamiltonian(),
                                  model_.family(), model_.schedule()->times(), prefix,
                                  model_.schedule()->times()[j]);
}

Matrix TwoTimeEngine::backward_prefix_matrix(const std::vector<int>& prefix) const {
    const std::size_t j = prefix.size() + 1;
    return detail::history_matrix(rho_f_conj_, model_.hamiltonian(), model_.family(),
                                  reversed_times_, prefix, reversed_times_[j]);
}

const Matrix& TwoTimeEngine::aggregated_backward(int j) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = backward_aggregates_.find(j);
    if (it != backward_aggregates_.end()) return it->second;

    // Sum of backward histories at tbar_{n-j} over the m^(n-1-j) tuples of
    // outcomes later than event j. Backward gap i reuses forward gap n-1-i.
    const int m = model_.family().size();
    const int depth = model_.schedule()->n() - 1 - j;
    checked_record_space(m, depth);

    const CollapseFamily& fam = model_.family();
    const std::size_t gaps = gap_unitaries_.size();
    auto backward_gap = [&](int i) -> const Matrix& {
        return gap_unitaries_[gaps - 1 - static_cast<std::size_t>(i)];
    };

    auto walk = [&](auto&& self, const Matrix& pibar, int applied, Matrix& sum) -> void {
        Matrix evolved = backward_gap(applied) * pibar * backward_gap(applied).adjoint();
        if (applied == depth) {
            sum += evolved;
            return;
        }
        for (int a = 0; a < m; ++a) {
            Matrix child = fam.weight(a) * (fam.op(a).matrix() * evolved * fam.op(a).matrix());
            self(self, child, applied + 1, sum);
        }
    };

    const int d = model_.dim();
    Matrix total = Matrix::Zero(d, d);
    if (depth == 0) {
        walk(walk, rho_f_conj_, 0, total);
    } else {
        std::vector<Matrix> branch_sums(static_cast<std::size_t>(m), Matrix::Zero(d, d));
        Matrix evolved = backward_gap(0) * rho_f_conj_ * backward_gap(0).adjoint();
        std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(static)
        for (int a = 0; a < m; ++a) {
            try {
                Matrix child =
                    fam.weight(a) * (fam.op(a).matrix() * evolved * fam.op(a).matrix());
                walk(walk, child, 1, branch_sums[static_cast<std::size_t>(a)]);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        for (const Matrix& s : branch_sums) total += s;
    }
    return backward_aggregates_.emplace(j, std::move(total)).first->second;
}

const Matrix& TwoTimeEngine::aggregated_forward(int j) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = forward_aggregates_.find(j);
    if (it != forward_aggregates_.end()) return it->second;

    // Sum of forward histories at t_{n-j} over the m^(n-1-j) tuples of
    // events 1..n-1-j (everything the backward view has not yet reached).
    const int m = model_.family().size();
    const int depth = model_.schedule()->n() - 1 - j;
    checked_record_space(m, depth);

    const CollapseFamily& fam = model_.family();
    auto walk = [&](auto&& self, const Matrix& pi, int applied, Matrix& sum) -> void {
        Matrix evolved = gap_unitaries_[static_cast<std::size_t>(applied)] * pi *
                         gap_unitaries_[static_cast<std::size_t>(applied)].adjoint();
        if (applied == depth) {
            sum += evolved;
            return;
        }
        for (int a = 0; a < m; ++a) {
            Matrix child = fam.weight(a) * (fam.op(a).matrix() * evolved * fam.op(a).matrix());
            self(self, child, applied + 1, sum);
        }
    };

    const int d = model_.dim();
    Matrix total = Matrix::Zero(d, d);
    if (depth == 0) {
        walk(walk, model_.rho_i().matrix(), 0, total);
    } else {
        std::vector<Matrix> branch_sums(static_cast<std::size_t>(m), Matrix::Zero(d, d));
        Matrix evolved =
            gap_unitaries_[0] * model_.rho_i().matrix() * gap_unitaries_[0].adjoint();
        std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(static)
        for (int a = 0; a < m; ++a) {
            try {
                Matrix child =
                    fam.weight(a) * (fam.op(a).matrix() * evolved * fam.op(a).matrix());
                walk(walk, child, 1, branch_sums[static_cast<std::size_t>(a)]);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        for (const Matrix& s : branch_sums) total += s;
    }
    return forward_aggregates_.emplace(j, std::move(total)).first->second;
}

std::vector<double> TwoTimeEngine::conditional_next_collapse(
    const std::vector<int>& prefix) const {
    const int events = model_.schedule()->event_count();
    const int j = static_cast<int>(prefix.size()) + 1;
    require_event_index(j);
    const int m = model_.family().size();
    for (int z : prefix) {
        if (z < 0 || z >= m) throw ValidationError("prefix outcome index out of range");
    }
    const CollapseFamily& fam = model_.family();
    const Tolerances& tol = model_.tol();

    Matrix pi_j = forward_prefix_matrix(prefix);
    if (pi_j.trace().real() <= tol.zero) {
        throw ZeroWeightError(
            "conditioning prefix has zero forward weight; no trajectory reaches it");
    }

    // Bidirectional route: contract each candidate event against the
    // aggregated backward history of all future outcome tuples.
    const Matrix& mbar = aggregated_backward(j);
    Matrix mbar_conj = mbar.conjugate();
    std::vector<double> bidirectional(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        const Matrix& l = fam.op(a).matrix();
        Complex value = (mbar_conj * l * pi_j * l).trace();
        bidirectional[static_cast<std::size_t>(a)] =
            fam.weight(a) * real_probability_trace(value, "conditional collapse numerator");
    }

    // Direct route: enumerate every future completion of the record.
    checked_record_space(m, events - j);
    const Matrix& rho_f = model_.rho_f().matrix();
    const Matrix& last_gap = gap_unitaries_.back();
    auto walk = [&](auto&& self, const Matrix& pi, int applied, double& sum) -> void {
        if (applied == events) {
            Matrix pi_n = last_gap * pi * last_gap.adjoint();
            sum += real_probability_trace((rho_f * pi_n).trace(), "conditional suffix weight");
            return;
        }
        Matrix evolved = gap_unitaries_[static_cast<std::size_t>(applied)] * pi *
                         gap_unitaries_[static_cast<std::size_t>(applied)].adjoint();
        for (int a = 0; a < m; ++a) {
            Matrix child = fam.weight(a) * (fam.op(a).matrix() * evolved * fam.op(a).matrix());
            self(self, child, applied + 1, sum);
        }
    };
    std::vector<double> direct(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        Matrix after_event = fam.weight(a) * (fam.op(a).matrix() * pi_j * fam.op(a).matrix());
        double sum = 0.0;
        walk(walk, after_event, j, sum);
        direct[static_cast<std::size_t>(a)] = sum;
    }

    auto p_bi =
        normalized_or_throw(std::move(bidirectional), tol.zero, "forward conditional collapse");
    auto p_direct =
        normalized_or_throw(std::move(direct), tol.zero, "forward conditional collapse");
    double gap = 0.0;
    for (int a = 0; a < m; ++a) {
        gap = std::max(gap, std::abs(p_bi[static_cast<std::size_t>(a)] -
                                     p_direct[static_cast<std::size_t>(a)]));
    }
    if (gap > 1e-10) {
        std::ostringstream os;
        os << "bidirectional and direct conditional distributions disagree by " << gap
           << "; the model violates the symmetry conditions (symmetric H and collapse "
              "operators, or proportional-to-identity boundary)";
        throw ModelValidityError(os.str());
    }
    return p_bi;
}

std::vector<double> TwoTimeEngine::backward_conditional_next_collapse(
    const std::vector<int>& prefix) const {
    const int events = model_.schedule()->event_count();
    const int j = static_cast<int>(prefix.size()) + 1;
    require_event_index(j);
    const int m = model_.family().size();
    for (int z : prefix) {
        if (z < 0 || z >= m) throw ValidationError("prefix outcome index out of range");
    }
    const CollapseFamily& fam = model_.family();
    const Tolerances& tol = model_.tol();

    Matrix pibar_j = backward_prefix_matrix(prefix);
    if (pibar_j.trace().real() <= tol.zero) {
        throw ZeroWeightError(
            "conditioning prefix has zero backward weight; no trajectory reaches it");
    }

    const Matrix& magg = aggregated_forward(j);
    Matrix magg_conj = magg.conjugate();
    std::vector<double> bidirectional(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        const Matrix& l = fam.op(a).matrix();
        Complex value = (magg_conj * l * pibar_j * l).trace();
        bidirectional[static_cast<std::size_t>(a)] =
            fam.weight(a) * real_probability_trace(value, "backward conditional numerator");
    }

    checked_record_space(m, events - j);
    const std::size_t gaps = gap_unitaries_.size();
    auto backward_gap = [&](int i) -> const Matrix& {
        return gap_unitaries_[gaps - 1 - static_cast<std::size_t>(i)];
    };
    auto walk = [&](auto&& self, const Matrix& pibar, int applied, double& sum) -> void {
        if (applied == events) {
            Matrix pibar_n = backward_gap(static_cast<int>(gaps) - 1) * pibar *
                             backward_gap(static_cast<int>(gaps) - 1).adjoint();
            sum += real_probability_trace((rho_i_conj_ * pibar_n).trace(),
                                          "backward conditional suffix weight");
            return;
        }
        Matrix evolved = backward_gap(applied) * pibar * backward_gap(applied).adjoint();
        for (int a = 0; a < m; ++a) {
            Matrix child = fam.weight(a) * (fam.op(a).matrix() * evolved * fam.op(a).matrix());
            self(self, child, applied + 1, sum);
        }
    };
    std::vector<double> direct(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        Matrix after_event =
            fam.weight(a) * (fam.op(a).matrix() * pibar_j * fam.op(a).matrix());
        double sum = 0.0;
        walk(walk, after_event, j, sum);
        direct[static_cast<std::size_t>(a)] = sum;
    }

    auto p_bi =
        normalized_or_throw(std::move(bidirectional), tol.zero, "backward conditional collapse");
    auto p_direct =
        normalized_or_throw(std::move(direct), tol.zero, "backward conditional collapse");
    double gap = 0.0;
    for (int a = 0; a < m; ++a) {
        gap = std::max(gap, std::abs(p_bi[static_cast<std::size_t>(a)] -
                                     p_direct[static_cast<std::size_t>(a)]));
    }
    if (gap > 1e-10) {
        std::ostringstream os;
        os << "bidirectional and direct backward conditionals disagree by " << gap
           << "; the model violates the symmetry conditions (symmetric H and collapse "
              "operators, or proportional-to-identity boundary)";
        throw ModelValidityError(os.str());
    }
    return p_bi;
}

Matrix TwoTimeEngine::aggregated_history(int j, Direction direction) const {
    require_event_index(j);
    return direction == Direction::forward ? aggregated_backward(j) : aggregated_forward(j);
}

double TwoTimeEngine::shielding_residual(int j, Direction direction) const {
    require_event_index(j);
    const Matrix& m =
        direction == Direction::forward ? aggregated_backward(j) : aggregated_forward(j);
    double tr = m.trace().real();
    if (tr <= model_.tol().zero) {
        std::ostringstream os;
        os << direction_name(direction) << " shielding aggregate at event " << j
           << " has vanishing trace " << tr;
        throw ZeroWeightError(os.str());
    }
    const int d = model_.dim();
    Matrix scaled = m / (tr / static_cast<double>(d));
    Matrix diff = scaled - Matrix::Identity(d, d);
    return diff.cwiseAbs().maxCoeff();
}

BornAnalysis TwoTimeEngine::born_analysis(int j, Direction direction,
                                          const std::vector<int>& prefix) const {
    require_event_index(j);
    if (static_cast<int>(prefix.size()) + 1 != j) {
        std::ostringstream os;
        os << "prefix of length " << prefix.size() << " does not address event " << j
           << " (need " << j - 1 << " earlier outcomes)";
        throw ValidationError(os.str());
    }

    BornAnalysis analysis;
    analysis.event_index = j;
    analysis.direction = direction;
    const Tolerances& tol = model_.tol();

    if (direction == Direction::forward) {
        analysis.conditional = conditional_next_collapse(prefix);
        auto [rho_j, weight] = normalize_history(
            DensityOperator(HermitianOperator(forward_prefix_matrix(prefix), model_.space(), tol),
                            DensityRole::unnormalized_history, tol),
            tol);
        (void)weight;
        analysis.born = collapse_distribution(rho_j, model_.family(), tol);
    } else {
        analysis.conditional = backward_conditional_next_collapse(prefix);
        auto [rhobar_j, weight] = normalize_history(
            DensityOperator(HermitianOperator(backward_prefix_matrix(prefix), model_.space(), tol),
                            DensityRole::unnormalized_history, tol),
            tol);
        (void)weight;
        analysis.born = collapse_distribution(rhobar_j, model_.family(), tol);
    }
    analysis.shielding_residual = shielding_residual(j, direction);

    double conditional_sum = 0.0, born_sum = 0.0;
    for (std::size_t a = 0; a < analysis.conditional.size(); ++a) {
        conditional_sum += analysis.conditional[a];
        born_sum += analysis.born[a];
        analysis.deviation =
            std::max(analysis.deviation, std::abs(analysis.conditional[a] - analysis.born[a]));
    }
    if (std::abs(conditional_sum - 1.0) > 1e-9 || std::abs(born_sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "distributions fail to normalize: conditional sums to " << conditional_sum
           << ", Born to " << born_sum;
        throw NumericalError(os.str());
    }
    return analysis;
}

std::string TwoTimeEngine::probability_table_csv() const {
    const RecordTable& t = table();
    std::ostringstream os;
    os << "record,weight,probability\n";
    for (std::uint64_t i = 0; i < t.size(); ++i) {
        std::vector<int> outcomes = t.decode(i);
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            if (k) os << ';';
            os << outcomes[k];
        }
        os << ',' << format_double(t.weights[static_cast<std::size_t>(i)]) << ','
           << format_double(t.probabilities[static_cast<std::size_t>(i)]) << '\n';
    }
    return os.str();
}

TwoTimeModel reversed_model(const TwoTimeModel& model) {
    const Tolerances& tol = model.tol();
    double trace_f = model.rho_f().matrix().trace().real();
    if (trace_f <= tol.zero) {
        throw ModelValidityError(
            "final boundary has vanishing trace; it cannot serve as an initial state");
    }
    // Swap and conjugate the boundaries. conj(rho_F)/tr is a valid state;
    // conj(rho_I) has eigenvalues in [0,1] so it is a valid final effect.
    Matrix rho_i_rev = model.rho_f().matrix().conjugate() / trace_f;
    Matrix rho_f_rev = model.rho_i().matrix().conjugate();

    const auto& times = model.schedule()->times();
    std::vector<double> reversed(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        reversed[i] = -times[times.size() - 1 - i];

    return TwoTimeModel(
        model.space(), model.hamiltonian(), model.family(),
        std::make_shared<const EventSchedule>(std::move(reversed)),
        DensityOperator(HermitianOperator(rho_i_rev, model.space(), tol), DensityRole::state,
                        tol),
        DensityOperator(HermitianOperator(rho_f_rev, model.space(), tol),
                        DensityRole::povm_element, tol),
        tol);
}

}  // namespace ttc
