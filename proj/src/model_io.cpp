#include "dyndr/error.hpp"
#include "dyndr/io_util.hpp"
#include "dyndr/models.hpp"

#include <json.hpp>

#include <optional>

namespace dyndr {
namespace {

using nlohmann::json;

[[noreturn]] void schema_violation(const std::string &what) {
	throw DataError("model document schema violation: " + what);
}

[[noreturn]] void dimension_error(const std::string &what) {
	throw DataError("model document dimension inconsistency: " + what);
}

const json &field(const json &obj, const char *name, const std::string &where) {
	if (!obj.is_object() || !obj.contains(name)) {
		schema_violation("missing field '" + where + name + "'");
	}
	return obj.at(name);
}

template <class T>
T get_as(const json &obj, const char *name, const std::string &where) {
	const json &v = field(obj, name, where);
	try {
		return v.get<T>();
	} catch (const json::exception &) {
		schema_violation("field '" + where + name + "' has the wrong type");
	}
}

json layout_json(const FeatureLayout &layout) {
	return {{"order", layout.state.order},
	        {"time_encoding", std::string(to_string(layout.state.time_encoding))},
	        {"intervals_per_day", layout.state.intervals_per_day},
	        {"columns", layout.columns}};
}

FeatureLayout layout_from(const json &j) {
	FeatureLayout layout;
	layout.state.order = get_as<int>(j, "order", "layout.");
	try {
		layout.state.time_encoding = parse_time_encoding(get_as<std::string>(j, "time_encoding", "layout."));
	} catch (const std::invalid_argument &e) {
		schema_violation(e.what());
	}
	layout.state.intervals_per_day = get_as<int>(j, "intervals_per_day", "layout.");
	layout.columns = get_as<std::vector<std::string>>(j, "columns", "layout.");
	if (layout.state.order < 0 || layout.state.intervals_per_day < 1) {
		schema_violation("layout has an invalid order or intervals_per_day");
	}
	if (layout.columns != layout.state.column_names()) {
		dimension_error("layout columns do not match order " + std::to_string(layout.state.order) + " with " +
		                std::string(to_string(layout.state.time_encoding)) + " time encoding");
	}
	return layout;
}

json scaler_json(const Scaler &s) {
	return {{"means", s.means}, {"stds", s.stds}, {"target_mean", s.target_mean}, {"target_std", s.target_std}};
}

Scaler scaler_from(const json &j, std::size_t width) {
	Scaler s;
	s.means = get_as<std::vector<double>>(j, "means", "scaler.");
	s.stds = get_as<std::vector<double>>(j, "stds", "scaler.");
	s.target_mean = get_as<double>(j, "target_mean", "scaler.");
	s.target_std = get_as<double>(j, "target_std", "scaler.");
	if (s.means.size() != width || s.stds.size() != width) {
		dimension_error("scaler has " + std::to_string(s.means.size()) + " columns, layout has " +
		                std::to_string(width));
	}
	for (double sd : s.stds) {
		if (!(sd > 0.0)) {
			schema_violation("scaler standard deviations must be positive");
		}
	}
	if (!(s.target_std > 0.0)) {
		schema_violation("scaler target_std must be positive");
	}
	return s;
}

json params_json(const ParamStore &p) {
	json arr = json::array();
	for (std::size_t i = 0; i < p.tensors().size(); ++i) {
		const auto &t = p.tensor(i);
		const auto v = p.get(i);
		arr.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}, {"values", std::vector<double>(v.begin(), v.end())}});
	}
	return arr;
}

// The model family implied by the first parameter tensor's name, if it is
// recognizable.
std::optional<ModelKind> payload_kind(const json &doc) {
	if (!doc.contains("parameters") || !doc["parameters"].is_array() || doc["parameters"].empty()) {
		return std::nullopt;
	}
	const json &first = doc["parameters"][0];
	if (!first.is_object() || !first.contains("name") || !first["name"].is_string()) {
		return std::nullopt;
	}
	const std::string name = first["name"].get<std::string>();
	if (name == "w") {
		return ModelKind::linear;
	}
	if (name.rfind("W[", 0) == 0 || name == "W_out") {
		return ModelKind::fnn;
	}
	if (name.rfind("W_h[", 0) == 0) {
		return ModelKind::rnn;
	}
	if (name.rfind("W_fh[", 0) == 0) {
		return ModelKind::lstm;
	}
	return std::nullopt;
}

// Fills `store` (already shaped by the architecture) from the document.
void params_from(const json &arr, ParamStore &store, std::string_view kind) {
	if (!arr.is_array()) {
		schema_violation("'parameters' must be an array");
	}
	if (arr.size() != store.tensors().size()) {
		throw DataError("model document kind tag '" + std::string(kind) + "' does not match payload: expected " +
		                std::to_string(store.tensors().size()) + " parameter tensors, found " +
		                std::to_string(arr.size()));
	}
	for (std::size_t i = 0; i < store.tensors().size(); ++i) {
		const auto &t = store.tensor(i);
		const json &entry = arr[i];
		const std::string name = get_as<std::string>(entry, "name", "parameters[].");
		if (name != t.name) {
			throw DataError("model document kind tag '" + std::string(kind) + "' does not match payload: expected tensor '" +
			                t.name + "', found '" + name + "'");
		}
		const auto rows = get_as<std::size_t>(entry, "rows", "parameters[].");
		const auto cols = get_as<std::size_t>(entry, "cols", "parameters[].");
		const auto values = get_as<std::vector<double>>(entry, "values", "parameters[].");
		if (rows != t.rows || cols != t.cols) {
			dimension_error("tensor '" + name + "' is " + std::to_string(rows) + "x" + std::to_string(cols) +
			                ", architecture requires " + std::to_string(t.rows) + "x" + std::to_string(t.cols));
		}
		if (values.size() != t.size()) {
			dimension_error("tensor '" + name + "' has " + std::to_string(values.size()) + " values, expected " +
			                std::to_string(t.size()));
		}
		std::copy(values.begin(), values.end(), store.get(i).begin());
	}
}

template <class M>
json recurrent_json(const M &m) {
	return {{"input_dim", m.net.input_dim()},
	        {"hidden", m.net.hidden_size()},
	        {"layers", m.net.layers()},
	        {"warmup", m.warmup}};
}

template <class M>
M recurrent_from(const json &doc, CellKind cell, const FeatureLayout &layout, std::string_view kind) {
	const json &arch = field(doc, "architecture", "");
	const auto input_dim = get_as<std::size_t>(arch, "input_dim", "architecture.");
	const auto hidden = get_as<std::size_t>(arch, "hidden", "architecture.");
	const auto layers = get_as<std::size_t>(arch, "layers", "architecture.");
	const auto warmup = get_as<std::size_t>(arch, "warmup", "architecture.");
	if (input_dim != layout.width()) {
		dimension_error("input_dim " + std::to_string(input_dim) + " does not match layout width " +
		                std::to_string(layout.width()));
	}
	if (hidden == 0 || layers == 0) {
		schema_violation("recurrent architecture needs positive hidden and layers");
	}
	M m;
	m.layout = layout;
	m.warmup = warmup;
	m.net = RecurrentNet(cell, input_dim, hidden, layers);
	params_from(field(doc, "parameters", ""), m.net.params(), kind);
	return m;
}

} // namespace

std::string model_to_json(const Model &model) {
	json doc;
	doc["schema_version"] = kModelSchemaVersion;
	doc["kind"] = std::string(to_string(kind_of(model)));
	doc["layout"] = layout_json(layout_of(model));
	doc["scaler"] = scaler_json(scaler_of(model));
	std::visit(
	    [&](const auto &m) {
		    using T = std::decay_t<decltype(m)>;
		    if constexpr (std::is_same_v<T, LinearModel>) {
			    doc["architecture"] = {{"input_dim", m.weights.size()}};
			    doc["parameters"] = json::array({{{"name", "w"}, {"rows", 1}, {"cols", m.weights.size()}, {"values", m.weights}},
			                                     {{"name", "b"}, {"rows", 1}, {"cols", 1}, {"values", {m.bias}}}});
		    } else if constexpr (std::is_same_v<T, FnnModel>) {
			    doc["architecture"] = {{"input_dim", m.net.input_dim()}, {"hidden", m.net.hidden()}};
			    doc["parameters"] = params_json(m.net.params());
		    } else {
			    doc["architecture"] = recurrent_json(m);
			    doc["parameters"] = params_json(m.net.params());
		    }
	    },
	    model);
	return doc.dump(1, '\t') + "\n";
}

Model model_from_json(std::string_view text) {
	json doc;
	try {
		doc = json::parse(text.begin(), text.end());
	} catch (const json::parse_error &e) {
		schema_violation(std::string("malformed document (") + e.what() + ")");
	}
	if (!doc.is_object()) {
		schema_violation("document root must be an object");
	}
	const int version = get_as<int>(doc, "schema_version", "");
	if (version != kModelSchemaVersion) {
		throw DataError("model document version mismatch: file has schema_version " + std::to_string(version) +
		                ", this build reads " + std::to_string(kModelSchemaVersion));
	}
	const std::string kind_name = get_as<std::string>(doc, "kind", "");
	ModelKind kind;
	try {
		kind = parse_model_kind(kind_name);
	} catch (const std::invalid_argument &e) {
		schema_violation(e.what());
	}
	if (const auto payload = payload_kind(doc); payload && *payload != kind) {
		throw DataError("model document kind tag '" + kind_name + "' does not match payload: parameters describe a " +
		                std::string(to_string(*payload)) + " model");
	}
	const FeatureLayout layout = layout_from(field(doc, "layout", ""));
	const Scaler scaler = scaler_from(field(doc, "scaler", ""), layout.width());

	switch (kind) {
	case ModelKind::linear: {
		ParamStore store;
		store.add("w", 1, layout.width());
		store.add("b", 1, 1);
		params_from(field(doc, "parameters", ""), store, kind_name);
		LinearModel m;
		m.layout = layout;
		m.scaler = scaler;
		const auto w = store.get(0);
		m.weights.assign(w.begin(), w.end());
		m.bias = store.get(1)[0];
		return m;
	}
	case ModelKind::fnn: {
		const json &arch = field(doc, "architecture", "");
		const auto input_dim = get_as<std::size_t>(arch, "input_dim", "architecture.");
		const auto hidden = get_as<std::vector<std::size_t>>(arch, "hidden", "architecture.");
		if (input_dim != layout.width()) {
			dimension_error("input_dim " + std::to_string(input_dim) + " does not match layout width " +
			                std::to_string(layout.width()));
		}
		FnnModel m;
		m.layout = layout;
		m.scaler = scaler;
		try {
			m.net = FnnNet(input_dim, hidden);
		} catch (const std::invalid_argument &e) {
			schema_violation(e.what());
		}
		params_from(field(doc, "parameters", ""), m.net.params(), kind_name);
		return m;
	}
	case ModelKind::rnn: {
		RnnModel m = recurrent_from<RnnModel>(doc, CellKind::rnn, layout, kind_name);
		m.scaler = scaler;
		return m;
	}
	case ModelKind::lstm: {
		LstmModel m = recurrent_from<LstmModel>(doc, CellKind::lstm, layout, kind_name);
		m.scaler = scaler;
		return m;
	}
	}
	schema_violation("unhandled model kind");
}

void save_model(const Model &model, const std::filesystem::path &path) {
	write_file_atomic(path, model_to_json(model));
}

Model load_model(const std::filesystem::path &path) {
	return model_from_json(read_file(path));
}

} // namespace dyndr
