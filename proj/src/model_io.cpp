#include "ssmic/error.hpp"
#include "ssmic/solver.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ssmic {

namespace {

constexpr const char* kSchema = "ssmic.cluster_model/1";

nlohmann::json matrix_rows(const Matrix& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix rows_matrix(const nlohmann::json& rows, Eigen::Index cols, const char* field) {
    if (!rows.is_array()) throw InputError(std::string("model field '") + field + "' must be an array of rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw InputError(std::string("model field '") + field + "' row " + std::to_string(i + 1) +
                             " has the wrong length");
        for (std::size_t j = 0; j < row.size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
    return m;
}

Vector to_vector(const nlohmann::json& values) {
    const auto v = values.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string model_to_json(const ClusterModel& model) {
    nlohmann::json doc;
    doc["schema"] = kSchema;
    doc["classes"] = model.classes;
    doc["t"] = model.params.t;
    doc["gamma"] = model.params.gamma;
    doc["eta"] = model.params.eta;
    doc["eigenvalues"] = std::vector<double>(model.lambda.data(), model.lambda.data() + model.lambda.size());
    doc["eigenvectors"] = matrix_rows(model.phi);
    doc["train_features"] = matrix_rows(model.train_features);
    doc["sigma"] = std::vector<double>(model.train_sigma.data(), model.train_sigma.data() + model.train_sigma.size());
    return doc.dump(1) + "\n";
}

ClusterModel model_from_json(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.value("schema", std::string{}) != kSchema)
            throw InputError(std::string("model document is not tagged '") + kSchema + "'");
        ClusterModel model;
        model.classes = doc.at("classes").get<int>();
        model.params.t = doc.at("t").get<std::size_t>();
        model.params.gamma = doc.at("gamma").get<double>();
        model.params.eta = doc.at("eta").get<double>();
        model.lambda = to_vector(doc.at("eigenvalues"));
        model.train_sigma = to_vector(doc.at("sigma"));
        const auto& features = doc.at("train_features");
        const auto d = features.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(features.front().size());
        model.train_features = rows_matrix(features, d, "train_features");
        model.phi = rows_matrix(doc.at("eigenvectors"), model.classes, "eigenvectors");
        const Eigen::Index n = model.train_features.rows();
        if (model.classes < 1 || model.lambda.size() != model.classes || model.phi.rows() != n ||
            model.train_sigma.size() != n || n < 1 || d < 1)
            throw InputError("model document has inconsistent dimensions");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed model document: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ClusterModel& model) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << model_to_json(model);
}

ClusterModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return model_from_json(text.str());
}

}  // namespace ssmic
