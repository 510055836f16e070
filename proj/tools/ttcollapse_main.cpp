// ttcollapse: two-time collapse-model toolbox.
//
// Exit codes: 0 success, 1 a requested check failed, 2 usage or config
// parse errors, 3 enumeration beyond the capacity cap, 4 numerical or
// model-validity failures. Diagnostics go to stderr; results go to the
// --out target (default stdout), so reruns are byte-identical.

#include <charconv>
#include <cstdint>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ttc/errors.hpp"
#include "ttc/forward.hpp"
#include "ttc/interferometer.hpp"
#include "ttc/io.hpp"
#include "ttc/oracle.hpp"
#include "ttc/rng.hpp"
#include "ttc/twotime.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        ttc::io::write_text_file(out_path, content);
    }
}

/// "0;1;0" or "0,1,0" -> {0, 1, 0}
std::vector<int> parse_outcome_list(const std::string& text) {
    std::vector<int> out;
    if (text.empty()) return out;
    std::string token;
    std::istringstream is(text);
    std::string normalized = text;
    for (char& c : normalized) {
        if (c == ',') c = ';';
    }
    std::istringstream ns(normalized);
    while (std::getline(ns, token, ';')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ttc::ValidationError("cannot parse outcome index \"" + token + "\"");
        }
    }
    return out;
}

std::string outcome_list_text(const std::vector<int>& outcomes) {
    std::ostringstream os;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (i) os << ';';
        os << outcomes[i];
    }
    return os.str();
}

int run_check(const std::string& config, const std::string& out_path) {
    ttc::TwoTimeModel model = ttc::io::load_model(config);
    ttc::SymmetryReport sym =
        ttc::check_symmetry_conditions(model.hamiltonian(), model.family(), model.tol());

    std::ostringstream os;
    os << "dim=" << model.dim() << "\n";
    os << "events=" << model.schedule()->event_count() << "\n";
    os << "outcomes=" << model.family().size() << "\n";
    os << "schedule=[" << fmt(model.schedule()->t0()) << ", " << fmt(model.schedule()->tn())
       << "]\n";
    os << "completeness_residual=" << fmt(ttc::completeness_residual(model.family())) << "\n";
    os << "h_asym=" << fmt(sym.h_asym) << "\n";
    os << "l_asym=" << fmt(sym.l_asym) << "\n";
    os << "symmetric=" << (sym.pass ? "true" : "false") << "\n";

    bool ok = true;
    try {
        ttc::TwoTimeEngine engine(model);
        double denom = engine.denominator();
        os << "denominator=" << fmt(denom) << "\n";
        if (denom <= model.tol().zero) {
            os << "status=incompatible-boundaries\n";
            ok = false;
        } else {
            os << "status=ok\n";
        }
    } catch (const ttc::CapacityError&) {
        os << "denominator=skipped (record space beyond enumeration cap)\n";
        os << "status=ok\n";
    }
    emit(out_path, os.str());
    if (!ok) {
        std::cerr << "error: boundary conditions admit no record\n";
        return 1;
    }
    return 0;
}

int run_symmetry(const std::string& config, const std::string& record_text,
                 const std::string& out_path) {
    ttc::TwoTimeModel model = ttc::io::load_model(config);
    ttc::TwoTimeEngine engine(model);

    std::ostringstream os;
    os << "record,weight,residual\n";
    double max_residual = 0.0;
    double max_allowed = 0.0;
    bool pass = true;

    auto visit = [&](const std::vector<int>& outcomes) {
        ttc::CollapseRecord record = model.make_record(outcomes);
        double weight = engine.joint_record_weight(record);
        double residual = engine.time_symmetry_residual(record);
        double allowed = 1e-10 * std::max(1.0, weight);
        if (residual > allowed) pass = false;
        if (residual > max_residual) max_residual = residual;
        if (allowed > max_allowed) max_allowed = allowed;
        os << outcome_list_text(outcomes) << ',' << fmt(weight) << ',' << fmt(residual)
           << '\n';
    };

    if (!record_text.empty()) {
        visit(parse_outcome_list(record_text));
    } else {
        const ttc::RecordTable& table = engine.table();
        for (std::uint64_t i = 0; i < table.size(); ++i) visit(table.decode(i));
    }

    emit(out_path, os.str());
    std::cerr << "max_residual=" << fmt(max_residual) << " pass=" << (pass ? "true" : "false")
              << "\n";
    return pass ? 0 : 1;
}

int run_sample(const std::string& config, std::uint64_t seed, int samples,
               const std::string& out_path) {
    ttc::TwoTimeModel model = ttc::io::load_model(config);
    std::vector<ttc::TrajectoryOutput> batch = ttc::sample_batch(model, seed, samples);
    emit(out_path, ttc::trajectory_csv(batch));
    return 0;
}

int run_enumerate(const std::string& config, const std::string& out_path) {
    ttc::TwoTimeModel model = ttc::io::load_model(config);
    ttc::TwoTimeEngine engine(model);
    emit(out_path, engine.probability_table_csv());
    std::cerr << "denominator=" << fmt(engine.denominator()) << "\n";
    return 0;
}

int run_born(const std::string& config, int event_index, const std::string& direction,
             const std::string& prefix_text, const std::string& out_path) {
    ttc::TwoTimeModel model = ttc::io::load_model(config);
    ttc::TwoTimeEngine engine(model);
    ttc::Direction dir;
    if (direction == "fwd") {
        dir = ttc::Direction::forward;
    } else if (direction == "bwd") {
        dir = ttc::Direction::backward;
    } else {
        throw ttc::ValidationError("--direction must be fwd or bwd");
    }
    ttc::BornAnalysis analysis =
        engine.born_analysis(event_index, dir, parse_outcome_list(prefix_text));
    emit(out_path, ttc::io::analysis_to_json(analysis).dump(2) + "\n");
    return 0;
}

int run_beam_splitter(std::uint64_t seed, int samples, const std::string& out_path) {
    ttc::TwoTimeModel model = ttc::beam_splitter_model();
    ttc::TwoTimeEngine engine(model);

    // Forward: probability that detector 0 clicks (marginal of event 2).
    const ttc::RecordTable& table = engine.table();
    double p_detector0 = 0.0;
    for (std::uint64_t i = 0; i < table.size(); ++i) {
        if (table.decode(i)[1] == 0) p_detector0 += table.probabilities[i];
    }

    // Backward: the click retrodicts the source-side record.
    std::vector<double> retrodiction = engine.backward_conditional_next_collapse({0});
    ttc::BornAnalysis backward = engine.born_analysis(2, ttc::Direction::backward, {0});

    nlohmann::json j;
    j["description"] =
        "two-path interferometer: event 1 = source-side which-path record, "
        "event 2 = detector click after the 50/50 mixing stage";
    j["p_detector0"] = p_detector0;
    j["p_source_path0_given_detector0"] = retrodiction[0];
    j["backward_born"] = backward.born;
    j["backward_deviation"] = backward.deviation;
    if (samples > 0) {
        std::vector<ttc::TrajectoryOutput> batch = ttc::sample_batch(model, seed, samples);
        std::uint64_t hits = 0;
        for (const ttc::TrajectoryOutput& t : batch) {
            if (t.record.outcomes()[1] == 0) ++hits;
        }
        j["empirical_p_detector0"] =
            static_cast<double>(hits) / static_cast<double>(samples);
        j["samples"] = samples;
    }
    emit(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-dimensional collapse models with two-time boundary conditions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ttcollapse 1.0.0");

    std::string config;
    std::string out_path = "-";
    std::string record_text;
    std::string prefix_text;
    std::string direction = "fwd";
    std::uint64_t seed = 1;
    int samples = 0;
    int event_index = 1;

    CLI::App* check = app.add_subcommand("check", "Validate a model config and report invariants");
    check->add_option("--config", config, "Model config JSON path")->required();
    check->add_option("--out", out_path, "Report target, '-' for stdout");

    CLI::App* symmetry = app.add_subcommand(
        "symmetry", "Time-symmetry residuals: forward vs reversed record weights");
    symmetry->add_option("--config", config, "Model config JSON path")->required();
    symmetry->add_option("--record", record_text,
                         "Single record as semicolon-joined outcome indices (default: all)");
    symmetry->add_option("--out", out_path, "CSV target, '-' for stdout");

    CLI::App* sample = app.add_subcommand("sample", "Sample forward collapse trajectories");
    sample->add_option("--config", config, "Model config JSON path")->required();
    sample->add_option("--seed", seed, "Base seed; trajectory i uses a derived stream");
    sample->add_option("--samples", samples, "Number of trajectories")
        ->required()
        ->check(CLI::Range(1, std::numeric_limits<int>::max()));
    sample->add_option("--out", out_path, "CSV target, '-' for stdout");

    CLI::App* enumerate =
        app.add_subcommand("enumerate", "Exhaustive record probability table");
    enumerate->add_option("--config", config, "Model config JSON path")->required();
    enumerate->add_option("--out", out_path, "CSV target, '-' for stdout");

    CLI::App* born = app.add_subcommand(
        "born", "Conditional collapse distribution vs the Born rule at one event");
    born->add_option("--config", config, "Model config JSON path")->required();
    born->add_option("--event", event_index, "1-based event index")->required();
    born->add_option("--direction", direction, "fwd or bwd (default fwd)");
    born->add_option("--prefix", prefix_text,
                     "Outcomes of the earlier events, semicolon-joined (forward labels for "
                     "fwd, backward labels for bwd)");
    born->add_option("--out", out_path, "JSON target, '-' for stdout");

    CLI::App* beam = app.add_subcommand(
        "beam-splitter", "Built-in interferometer demo: Born forward, certainty backward");
    beam->add_option("--seed", seed, "Base seed for the optional sampling check");
    beam->add_option("--samples", samples, "Trajectories for an empirical check (0 = skip)")
        ->check(CLI::Range(0, std::numeric_limits<int>::max()));
    beam->add_option("--out", out_path, "JSON target, '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*check) return run_check(config, out_path);
        if (*symmetry) return run_symmetry(config, record_text, out_path);
        if (*sample) return run_sample(config, seed, samples, out_path);
        if (*enumerate) return run_enumerate(config, out_path);
        if (*born) return run_born(config, event_index, direction, prefix_text, out_path);
        if (*beam) return run_beam_splitter(seed, samples, out_path);
    } catch (const ttc::CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ttc::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ttc::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ttc::Error& e) {
        // ZeroWeightError, ModelValidityError, NumericalError
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
