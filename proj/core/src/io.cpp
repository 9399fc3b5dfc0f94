#include "stagedtrees/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include "stagedtrees/errors.hpp"

namespace stagedtrees {

namespace {

using nlohmann::json;

std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Columns {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> levels;
};

// Discovers variables and level lists from a table, excluding `skip` columns.
Columns discover(const CsvTable& table, const LoadOptions& options,
                 const std::set<std::size_t>& skip) {
  Columns cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (skip.count(c)) continue;
    cols.names.push_back(table.header[c]);
    std::vector<std::string> seen;
    std::set<std::string> unique;
    for (const auto& row : table.rows) {
      if (unique.insert(row[c]).second) seen.push_back(row[c]);
    }
    if (auto it = options.levels.find(table.header[c]); it != options.levels.end()) {
      for (const auto& l : seen) {
        if (std::find(it->second.begin(), it->second.end(), l) == it->second.end()) {
          throw ValidationError("value '" + l + "' of '" + table.header[c] +
                                "' is not among its declared levels");
        }
      }
      seen = it->second;
    } else if (options.level_order == LevelOrder::lexicographic) {
      std::sort(seen.begin(), seen.end());
    }
    cols.levels.push_back(std::move(seen));
  }
  return cols;
}

EventTree make_tree(const Columns& cols) {
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < cols.names.size(); ++i) {
    auto levels = cols.levels[i];
    if (levels.size() == 1) {
      throw ValidationError("variable '" + cols.names[i] + "' has a single observed level; declare its levels");
    }
    vars.push_back({cols.names[i], std::move(levels)});
  }
  return EventTree(std::move(vars));
}

void check_table(const CsvTable& table) {
  if (table.header.empty()) throw ValidationError("CSV input is empty");
  std::set<std::string> names(table.header.begin(), table.header.end());
  if (names.size() != table.header.size()) throw ValidationError("duplicate column name in CSV header");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (const auto& f : table.rows[r]) {
      if (f.empty()) throw ValidationError("empty field in CSV row " + std::to_string(r + 2));
    }
  }
}

Dataset finish(Dataset ds, const LoadOptions& options) {
  if (options.order) return ds.reordered(*options.order);
  return ds;
}

}  // namespace

CsvTable parse_csv(std::string_view bytes) {
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false, field_started = false;
  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(fields.size() == 1 && fields[0].empty())) records.push_back(std::move(fields));
    fields.clear();
  };
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const char c = bytes[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      in_quotes = field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < bytes.size() && bytes[i + 1] == '\n') ++i;
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw ValidationError("unterminated quoted field in CSV");
  if (field_started || !fields.empty()) end_record();
  if (records.empty()) throw ValidationError("CSV input is empty");

  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw ValidationError("ragged CSV: row " + std::to_string(r + 1) + " has " +
                            std::to_string(records[r].size()) + " fields, expected " +
                            std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

std::string write_csv(const CsvTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += quote_field(fields[i]);
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

Dataset load_records_csv(std::string_view bytes, const LoadOptions& options) {
  CsvTable table = parse_csv(bytes);
  check_table(table);
  if (table.rows.empty()) throw ValidationError("CSV has a header but no records");
  Columns cols = discover(table, options, {});
  EventTree tree = make_tree(cols);
  std::vector<double> counts(tree.num_leaves(), 0.0);
  std::vector<std::size_t> levels(tree.size());
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) levels[c] = tree.level_index(c, row[c]);
    counts[tree.encode_levels(levels).index] += 1.0;
  }
  return finish(Dataset(std::move(tree), std::move(counts)), options);
}

Dataset load_counts_csv(std::string_view bytes, std::string_view freq_column, const LoadOptions& options) {
  CsvTable table = parse_csv(bytes);
  check_table(table);
  auto it = std::find(table.header.begin(), table.header.end(), freq_column);
  if (it == table.header.end()) {
    throw ValidationError("frequency column '" + std::string(freq_column) + "' not found");
  }
  const std::size_t freq = static_cast<std::size_t>(it - table.header.begin());
  if (table.header.size() < 2) throw ValidationError("counts table needs at least one variable column");
  Columns cols = discover(table, options, {freq});
  EventTree tree = make_tree(cols);
  std::vector<double> counts(tree.num_leaves(), 0.0);
  std::vector<std::size_t> levels(tree.size());
  for (const auto& row : table.rows) {
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(row[freq], &used);
      if (used != row[freq].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("frequency '" + row[freq] + "' is not a number");
    }
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw ValidationError("frequency '" + row[freq] + "' is negative or not finite");
    }
    for (std::size_t c = 0, v = 0; c < row.size(); ++c) {
      if (c == freq) continue;
      levels[v] = tree.level_index(v, row[c]);
      ++v;
    }
    counts[tree.encode_levels(levels).index] += value;
  }
  return finish(Dataset(std::move(tree), std::move(counts)), options);
}

std::vector<Record> parse_records(const CsvTable& table, const EventTree& tree,
                                  std::span<const std::string> optional_columns) {
  const std::size_t n = tree.size();
  std::vector<std::size_t> column(n, std::string::npos);
  for (std::size_t d = 0; d < n; ++d) {
    auto it = std::find(table.header.begin(), table.header.end(), tree.variable(d).name);
    if (it != table.header.end()) {
      column[d] = static_cast<std::size_t>(it - table.header.begin());
    } else if (std::find(optional_columns.begin(), optional_columns.end(), tree.variable(d).name) ==
               optional_columns.end()) {
      throw ValidationError("column '" + tree.variable(d).name + "' missing from data");
    }
  }
  std::vector<Record> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Record r(n, std::string::npos);
    for (std::size_t d = 0; d < n; ++d) {
      if (column[d] != std::string::npos) r[d] = tree.level_index(d, row[column[d]]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string records_to_csv(const EventTree& tree, std::span<const Record> records) {
  CsvTable table;
  table.header = tree.names();
  for (const auto& r : records) {
    std::vector<std::string> row;
    for (std::size_t d = 0; d < tree.size(); ++d) row.push_back(tree.variable(d).levels.at(r.at(d)));
    table.rows.push_back(std::move(row));
  }
  return write_csv(table);
}

std::string save_model(const StagedTree& model) {
  const auto& tree = model.tree();
  json doc;
  doc["version"] = kModelFormatVersion;
  doc["variables"] = json::array();
  for (const auto& v : tree.variables()) doc["variables"].push_back({{"name", v.name}, {"levels", v.levels}});
  doc["lambda"] = model.lambda();
  doc["name_unobserved"] = model.unobserved_name();
  doc["fitted"] = model.fitted();
  doc["strata"] = json::array();
  for (std::size_t d = 0; d < tree.size(); ++d) {
    const auto& s = model.stratum(d);
    json stratum;
    stratum["variable"] = tree.variable(d).name;
    stratum["stages"] = json::array();
    for (const auto& id : model.stages_in_order(d)) {
      const auto& st = s.stages.at(id);
      json stage;
      stage["id"] = id;
      stage["members"] = model.members(d, id);
      stage["counts"] = st.counts;
      stage["probs"] = st.probs ? json(*st.probs) : json(nullptr);
      stratum["stages"].push_back(std::move(stage));
    }
    if (s.has_counts()) stratum["vertex_counts"] = s.vertex_counts;
    doc["strata"].push_back(std::move(stratum));
  }
  return doc.dump(1) + "\n";
}

StagedTree load_model(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("version")) throw ValidationError("model document has no version");
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw ValidationError("unsupported model version " + doc.at("version").dump());
    }
    std::vector<Variable> vars;
    for (const auto& v : doc.at("variables")) {
      vars.push_back({v.at("name").get<std::string>(), v.at("levels").get<std::vector<std::string>>()});
    }
    EventTree tree(std::move(vars));
    const double lambda = doc.at("lambda").get<double>();
    const std::string unobserved = doc.value("name_unobserved", std::string(kDefaultUnobserved));
    const bool fitted = doc.at("fitted").get<bool>();
    const auto& strata_doc = doc.at("strata");
    if (!strata_doc.is_array() || strata_doc.size() != tree.size()) {
      throw ValidationError("model needs one stratum entry per variable");
    }
    std::vector<Stratum> strata(tree.size());
    for (std::size_t d = 0; d < tree.size(); ++d) {
      const auto& sd = strata_doc[d];
      auto& s = strata[d];
      const std::size_t size = tree.stratum_size(d);
      s.vertex_stage.assign(size, std::string());
      for (const auto& stage_doc : sd.at("stages")) {
        const auto id = stage_doc.at("id").get<std::string>();
        if (s.stages.count(id)) throw ValidationError("stage '" + id + "' listed twice in a stratum");
        Stage stage;
        stage.counts = stage_doc.at("counts").get<std::vector<double>>();
        if (!stage_doc.at("probs").is_null()) stage.probs = stage_doc.at("probs").get<std::vector<double>>();
        for (auto m : stage_doc.at("members").get<std::vector<std::size_t>>()) {
          if (m >= size) {
            throw ValidationError("stage '" + id + "' has member " + std::to_string(m) +
                                  " outside stratum '" + tree.variable(d).name + "'");
          }
          if (!s.vertex_stage[m].empty()) {
            throw ValidationError("vertex " + std::to_string(m) + " belongs to two stages");
          }
          s.vertex_stage[m] = id;
        }
        s.stages.emplace(id, std::move(stage));
      }
      for (std::size_t v = 0; v < size; ++v) {
        if (s.vertex_stage[v].empty()) {
          throw ValidationError("vertex " + std::to_string(v) + " of stratum '" + tree.variable(d).name +
                                "' has no stage");
        }
      }
      if (sd.contains("vertex_counts")) s.vertex_counts = sd.at("vertex_counts").get<std::vector<double>>();
    }
    return StagedTree(std::move(tree), std::move(strata), lambda, unobserved, fitted);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model schema violation: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing '" + path + "'");
}

}  // namespace stagedtrees
