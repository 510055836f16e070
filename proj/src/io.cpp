#include "ttc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <utility>

#include "ttc/errors.hpp"

namespace ttc::io {

using nlohmann::json;

namespace {

std::pair<int, int> line_column_at(const std::string& text, std::size_t byte) {
    std::size_t pos = byte == 0 ? 0 : byte - 1;
    if (pos > text.size()) pos = text.size();
    int line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < pos; ++i) {
        if (text[i] == '\n') {
            ++line;
            line_start = i + 1;
        }
    }
    return {line, static_cast<int>(pos - line_start) + 1};
}

/// Config objects must carry exactly the listed fields, no more and no less.
void require_exact_fields(const json& j, const char* what,
                          std::initializer_list<const char*> fields) {
    if (!j.is_object()) {
        throw ParseError(std::string(what) + ": expected a JSON object");
    }
    for (const auto& item : j.items()) {
        bool known = std::any_of(fields.begin(), fields.end(), [&](const char* f) {
            return item.key() == f;
        });
        if (!known) {
            throw ParseError(std::string(what) + ": unknown field \"" + item.key() + "\"");
        }
    }
    for (const char* f : fields) {
        if (!j.contains(f)) {
            throw ParseError(std::string(what) + ": missing field \"" + f + "\"");
        }
    }
}

double number_at(const json& j, const char* what) {
    if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(std::string(what) + ": non-finite number");
    return v;
}

std::vector<double> number_array(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(number_at(v, what));
    return out;
}

json real_part_rows(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c).real());
        rows.push_back(std::move(row));
    }
    return rows;
}

json imag_part_rows(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c).imag());
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix operator_with_dim(const json& j, const char* what, int expected_dim) {
    Matrix m = matrix_from_json(j);
    if (m.rows() != expected_dim) {
        std::ostringstream os;
        os << what << ": operator dim " << m.rows() << " does not match model dim "
           << expected_dim;
        throw ParseError(os.str());
    }
    return m;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
    json j;
    j["dim"] = static_cast<int>(m.rows());
    j["re"] = real_part_rows(m);
    j["im"] = imag_part_rows(m);
    return j;
}

Matrix matrix_from_json(const json& j) {
    require_exact_fields(j, "operator", {"dim", "re", "im"});
    if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1) {
        throw ParseError("operator: \"dim\" must be a positive integer");
    }
    const int dim = j["dim"].get<int>();
    Matrix m(dim, dim);
    for (const char* part : {"re", "im"}) {
        const json& rows = j[part];
        if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
            std::ostringstream os;
            os << "operator: \"" << part << "\" must be an array of " << dim << " rows";
            throw ParseError(os.str());
        }
        for (int r = 0; r < dim; ++r) {
            std::vector<double> row = number_array(rows[static_cast<std::size_t>(r)],
                                                   "operator row");
            if (static_cast<int>(row.size()) != dim) {
                std::ostringstream os;
                os << "operator: row " << r << " of \"" << part << "\" has "
                   << row.size() << " entries, expected " << dim;
                throw ParseError(os.str());
            }
            for (int c = 0; c < dim; ++c) {
                if (part[0] == 'r') {
                    m(r, c) = Complex(row[static_cast<std::size_t>(c)], 0.0);
                } else {
                    m(r, c) += Complex(0.0, row[static_cast<std::size_t>(c)]);
                }
            }
        }
    }
    return m;
}

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, column] = line_column_at(text, e.byte);
        std::ostringstream os;
        os << "JSON syntax error at line " << line << ", column " << column << ": "
           << e.what();
        throw ParseError(os.str(), line, column);
    }
}

ModelDocument ModelDocument::from_json(const json& j) {
    require_exact_fields(j, "model config",
                         {"dim", "basis_labels", "H", "family", "schedule", "rho_I", "rho_F"});
    ModelDocument doc;
    if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1) {
        throw ParseError("model config: \"dim\" must be a positive integer");
    }
    doc.dim = j["dim"].get<int>();

    const json& labels = j["basis_labels"];
    if (!labels.is_array() || static_cast<int>(labels.size()) != doc.dim) {
        throw ParseError("model config: \"basis_labels\" must list one label per dimension");
    }
    for (const auto& l : labels) {
        if (!l.is_string()) throw ParseError("model config: basis labels must be strings");
        doc.basis_labels.push_back(l.get<std::string>());
    }

    doc.h = operator_with_dim(j["H"], "H", doc.dim);
    doc.rho_i = operator_with_dim(j["rho_I"], "rho_I", doc.dim);
    doc.rho_f = operator_with_dim(j["rho_F"], "rho_F", doc.dim);

    doc.schedule = number_array(j["schedule"], "schedule");
    if (doc.schedule.size() < 2) {
        throw ParseError("model config: \"schedule\" needs at least the two boundary times");
    }

    const json& fam = j["family"];
    if (!fam.is_object() || !fam.contains("kind") || !fam["kind"].is_string()) {
        throw ParseError("model config: \"family\" must be an object with a \"kind\"");
    }
    const std::string kind = fam["kind"].get<std::string>();
    if (kind == "projective") {
        require_exact_fields(fam, "projective family", {"kind", "projectors"});
        if (!fam["projectors"].is_array() || fam["projectors"].empty()) {
            throw ParseError("projective family: \"projectors\" must be a non-empty array");
        }
        ProjectiveFamilySpec spec;
        for (const auto& p : fam["projectors"]) {
            spec.projectors.push_back(operator_with_dim(p, "projector", doc.dim));
        }
        doc.family = std::move(spec);
    } else if (kind == "grw") {
        require_exact_fields(fam, "grw family", {"kind", "alpha", "x_op", "lattice"});
        GrwFamilySpec spec;
        spec.alpha = number_at(fam["alpha"], "grw family alpha");
        spec.x_op = operator_with_dim(fam["x_op"], "x_op", doc.dim);
        spec.lattice = number_array(fam["lattice"], "grw family lattice");
        if (spec.lattice.empty()) {
            throw ParseError("grw family: \"lattice\" must be non-empty");
        }
        doc.family = std::move(spec);
    } else {
        throw ParseError("model config: unknown family kind \"" + kind +
                         "\" (expected \"projective\" or \"grw\")");
    }
    return doc;
}

json ModelDocument::to_json() const {
    json j;
    j["dim"] = dim;
    j["basis_labels"] = basis_labels;
    j["H"] = matrix_to_json(h);
    j["schedule"] = schedule;
    j["rho_I"] = matrix_to_json(rho_i);
    j["rho_F"] = matrix_to_json(rho_f);
    if (std::holds_alternative<ProjectiveFamilySpec>(family)) {
        const auto& spec = std::get<ProjectiveFamilySpec>(family);
        json fam;
        fam["kind"] = "projective";
        json projs = json::array();
        for (const Matrix& p : spec.projectors) projs.push_back(matrix_to_json(p));
        fam["projectors"] = std::move(projs);
        j["family"] = std::move(fam);
    } else {
        const auto& spec = std::get<GrwFamilySpec>(family);
        json fam;
        fam["kind"] = "grw";
        fam["alpha"] = spec.alpha;
        fam["x_op"] = matrix_to_json(spec.x_op);
        fam["lattice"] = spec.lattice;
        j["family"] = std::move(fam);
    }
    return j;
}

TwoTimeModel ModelDocument::build(const Tolerances& tol) const {
    SpacePtr space = HilbertSpace::make(dim, basis_labels);
    HermitianOperator hamiltonian(h, space, tol);

    CollapseFamily fam = [&]() -> CollapseFamily {
        if (std::holds_alternative<ProjectiveFamilySpec>(family)) {
            const auto& spec = std::get<ProjectiveFamilySpec>(family);
            std::vector<HermitianOperator> projectors;
            projectors.reserve(spec.projectors.size());
            for (const Matrix& p : spec.projectors)
                projectors.emplace_back(p, space, tol);
            return build_projective_family(projectors, tol);
        }
        const auto& spec = std::get<GrwFamilySpec>(family);
        return build_grw_family(spec.lattice, HermitianOperator(spec.x_op, space, tol),
                                spec.alpha, tol);
    }();

    return TwoTimeModel(space, std::move(hamiltonian), std::move(fam),
                        std::make_shared<const EventSchedule>(schedule),
                        DensityOperator(HermitianOperator(rho_i, space, tol),
                                        DensityRole::state, tol),
                        DensityOperator(HermitianOperator(rho_f, space, tol),
                                        DensityRole::povm_element, tol),
                        tol);
}

ModelDocument parse_document(const std::string& text) {
    return ModelDocument::from_json(parse_json_text(text));
}

TwoTimeModel parse_model(const std::string& text, const Tolerances& tol) {
    return parse_document(text).build(tol);
}

TwoTimeModel load_model(const std::string& path, const Tolerances& tol) {
    return parse_model(read_text_file(path), tol);
}

ModelDocument load_document(const std::string& path) {
    return parse_document(read_text_file(path));
}

std::string document_text(const ModelDocument& doc) {
    return doc.to_json().dump(2) + "\n";
}

json analysis_to_json(const BornAnalysis& analysis) {
    json j;
    j["j"] = analysis.event_index;
    j["direction"] = direction_name(analysis.direction);
    j["conditional"] = analysis.conditional;
    j["born"] = analysis.born;
    j["deviation"] = analysis.deviation;
    j["shielding_residual"] = analysis.shielding_residual;
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw ParseError("failed reading file: " + path);
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw ParseError("failed writing file: " + path);
}

}  // namespace ttc::io
