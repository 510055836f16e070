#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ttc/model.hpp"
#include "ttc/twotime.hpp"

namespace ttc::io {

/// Operator JSON layout: {"dim": d, "re": [[..]], "im": [[..]]}, row-major
/// dense real and imaginary parts.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

/// Parses JSON text; syntax errors surface as ParseError with the 1-based
/// line and column of the offending byte.
nlohmann::json parse_json_text(const std::string& text);

/// Collapse family described by its construction parameters rather than the
/// built operators, so a saved model rebuilds identically.
struct ProjectiveFamilySpec {
    std::vector<Matrix> projectors;
};

struct GrwFamilySpec {
    double alpha = 0.0;
    Matrix x_op;
    std::vector<double> lattice;
};

using FamilySpec = std::variant<ProjectiveFamilySpec, GrwFamilySpec>;

/// A model config as written on disk. Parsing is strict: unknown fields are
/// rejected everywhere, and to_json(from_json(x)) == x byte for byte.
struct ModelDocument {
    int dim = 0;
    std::vector<std::string> basis_labels;
    Matrix h;
    FamilySpec family;
    std::vector<double> schedule;
    Matrix rho_i;
    Matrix rho_f;

    static ModelDocument from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    TwoTimeModel build(const Tolerances& tol = default_tolerances()) const;
};

/// Text/file conveniences. parse_model/load_model go straight to a built,
/// validated model.
ModelDocument parse_document(const std::string& text);
TwoTimeModel parse_model(const std::string& text,
                         const Tolerances& tol = default_tolerances());
TwoTimeModel load_model(const std::string& path,
                        const Tolerances& tol = default_tolerances());
ModelDocument load_document(const std::string& path);
std::string document_text(const ModelDocument& doc);

/// {"j", "direction", "conditional", "born", "deviation", "shielding_residual"}
nlohmann::json analysis_to_json(const BornAnalysis& analysis);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ttc::io
