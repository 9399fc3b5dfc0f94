#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stagedtrees/dataset.hpp"
#include "stagedtrees/staged_tree.hpp"

namespace stagedtrees {

enum class LevelOrder { lexicographic, first_appearance };

struct LoadOptions {
  /// Variable order of the resulting tree; defaults to the column order.
  std::optional<std::vector<std::string>> order;
  LevelOrder level_order = LevelOrder::lexicographic;
  /// Explicit level lists per variable; these win over `level_order`.
  std::map<std::string, std::vector<std::string>> levels;
};

/// RFC 4180 table: header plus rows, all fields as text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(std::string_view bytes);
std::string write_csv(const CsvTable& table);

/// One observation per row; every column is a categorical variable.
Dataset load_records_csv(std::string_view bytes, const LoadOptions& options = {});

/// One cell per row with its count in `freq_column`; repeated cells add up and
/// missing cells count zero.
Dataset load_counts_csv(std::string_view bytes, std::string_view freq_column,
                        const LoadOptions& options = {});

/// Parses rows of level labels against a known tree (columns matched by
/// name, extra columns ignored). Columns listed in `optional_columns` may be
/// absent; their entries are returned as npos.
std::vector<Record> parse_records(const CsvTable& table, const EventTree& tree,
                                  std::span<const std::string> optional_columns = {});

std::string records_to_csv(const EventTree& tree, std::span<const Record> records);

/// `.sevt.json` model document.
inline constexpr int kModelFormatVersion = 1;
std::string save_model(const StagedTree& model);
StagedTree load_model(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace stagedtrees
