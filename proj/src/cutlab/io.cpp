#include "io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace cutlab {

namespace {

using ordered_json = nlohmann::ordered_json;

int line_of_byte_offset(const std::string& text, size_t pos) {
  int line = 1;
  for (size_t i = 0; i < pos && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

double bound_from_json(const ordered_json& v, bool lower) {
  if (v.is_null()) return lower ? -kInf : kInf;
  return v.get<double>();
}

ordered_json bound_to_json(double v) {
  if (!is_finite_bound(v)) return nullptr;
  return v;
}

}  // namespace

MilpInstance read_json_instance(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_of_byte_offset(text, e.byte), e.what());
  }
  try {
    MilpInstance inst;
    inst.name = j.at("name").get<std::string>();
    const std::string sense = j.at("sense").get<std::string>();
    if (sense == "minimize")
      inst.sense = Sense::Minimize;
    else if (sense == "maximize")
      inst.sense = Sense::Maximize;
    else
      throw ParseError(1, "unknown sense \"" + sense + "\"");
    inst.objective = j.at("objective").get<std::vector<double>>();
    inst.n_vars = int(inst.objective.size());
    for (const auto& jr : j.at("rows")) {
      Row r;
      for (const auto& c : jr.at("coeffs"))
        r.coeffs.emplace_back(c.at(0).get<int>(), c.at(1).get<double>());
      r.rhs = jr.at("rhs").get<double>();
      inst.rows.push_back(std::move(r));
    }
    for (const auto& v : j.at("lower"))
      inst.var_lower.push_back(bound_from_json(v, true));
    for (const auto& v : j.at("upper"))
      inst.var_upper.push_back(bound_from_json(v, false));
    inst.integrality = j.at("integrality").get<std::vector<int>>();
    inst.family_tag = j.at("family").get<std::string>();
    if (j.contains("generator_version"))
      inst.generator_version = j["generator_version"].get<int>();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("instance JSON: ") + e.what());
  }
}

std::string write_json_instance(const MilpInstance& inst) {
  for (const Row& r : inst.rows)
    if (r.relation != Relation::LE)
      throw InvalidInstance(
          "only \"<=\" rows are serializable; normalize first");
  ordered_json j;
  j["name"] = inst.name;
  j["sense"] = inst.sense == Sense::Minimize ? "minimize" : "maximize";
  j["objective"] = inst.objective;
  ordered_json rows = ordered_json::array();
  for (const Row& r : inst.rows) {
    ordered_json jr;
    ordered_json coeffs = ordered_json::array();
    for (const auto& [idx, val] : r.coeffs)
      coeffs.push_back(ordered_json::array({idx, val}));
    jr["coeffs"] = std::move(coeffs);
    jr["rhs"] = r.rhs;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  ordered_json lower = ordered_json::array(), upper = ordered_json::array();
  for (double v : inst.var_lower) lower.push_back(bound_to_json(v));
  for (double v : inst.var_upper) upper.push_back(bound_to_json(v));
  j["lower"] = std::move(lower);
  j["upper"] = std::move(upper);
  j["integrality"] = inst.integrality;
  j["family"] = inst.family_tag;
  if (inst.generator_version != 0)
    j["generator_version"] = inst.generator_version;
  return j.dump(2) + "\n";
}

namespace {

struct MpsRow {
  char type = 'L';  // N, L, G, E
  int index = -1;   // position among constraint rows; -1 for the objective
  double range = 0.0;
  bool has_range = false;
};

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

double parse_mps_number(const std::string& tok, int line_no) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, "expected a number, got \"" + tok + "\"");
  }
}

}  // namespace

MilpInstance read_mps_instance(const std::string& text) {
  MilpInstance inst;
  inst.sense = Sense::Minimize;

  std::map<std::string, MpsRow> rows;
  std::string obj_row_name;
  std::vector<std::string> row_order;            // constraint rows, in order
  std::map<std::string, int> col_index;          // name -> variable index
  std::vector<std::map<int, double>> col_coeffs; // per constraint row
  std::vector<double> rhs_by_row;

  enum Section { None, Rows, Columns, Rhs, Ranges, Bounds, Done };
  Section section = None;
  bool in_integer_block = false;

  auto ensure_col = [&](const std::string& name) -> int {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    const int idx = int(col_index.size());
    col_index.emplace(name, idx);
    inst.objective.push_back(0.0);
    inst.var_lower.push_back(0.0);
    inst.var_upper.push_back(kInf);
    if (in_integer_block) inst.integrality.push_back(idx);
    return idx;
  };

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;

    const bool header = !std::isspace(static_cast<unsigned char>(line[0]));
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) continue;

    if (header) {
      const std::string& sec = toks[0];
      if (sec == "NAME") {
        inst.name = toks.size() > 1 ? toks[1] : "";
      } else if (sec == "ROWS") {
        section = Rows;
      } else if (sec == "COLUMNS") {
        section = Columns;
      } else if (sec == "RHS") {
        section = Rhs;
      } else if (sec == "RANGES") {
        section = Ranges;
      } else if (sec == "BOUNDS") {
        section = Bounds;
      } else if (sec == "ENDATA") {
        section = Done;
        break;
      } else {
        throw UnsupportedMpsFeature(sec);
      }
      continue;
    }

    switch (section) {
      case Rows: {
        if (toks.size() != 2) throw ParseError(line_no, "ROWS entry needs a type and a name");
        const std::string type = toks[0];
        const std::string& name = toks[1];
        if (rows.count(name)) throw ParseError(line_no, "duplicate row \"" + name + "\"");
        if (type == "N") {
          if (!obj_row_name.empty())
            throw UnsupportedMpsFeature("multiple objective (N) rows");
          obj_row_name = name;
          rows[name] = MpsRow{'N', -1, 0.0, false};
        } else if (type == "L" || type == "G" || type == "E") {
          MpsRow r;
          r.type = type[0];
          r.index = int(row_order.size());
          rows[name] = r;
          row_order.push_back(name);
          col_coeffs.emplace_back();
          rhs_by_row.push_back(0.0);
        } else {
          throw ParseError(line_no, "unknown row type \"" + type + "\"");
        }
        break;
      }
      case Columns: {
        // Integrality marker lines carry the 'MARKER' tag.
        bool is_marker = false;
        for (const std::string& t : toks)
          if (t == "'MARKER'") is_marker = true;
        if (is_marker) {
          for (const std::string& t : toks) {
            if (t == "'INTORG'") in_integer_block = true;
            if (t == "'INTEND'") in_integer_block = false;
          }
          break;
        }
        if (toks.size() != 3 && toks.size() != 5)
          throw ParseError(line_no, "COLUMNS entry needs 1 or 2 (row, value) pairs");
        const int col = ensure_col(toks[0]);
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          const std::string& row_name = toks[k];
          const double value = parse_mps_number(toks[k + 1], line_no);
          auto it = rows.find(row_name);
          if (it == rows.end())
            throw ParseError(line_no, "unknown row \"" + row_name + "\"");
          if (it->second.type == 'N') {
            if (inst.objective[size_t(col)] != 0.0)
              throw ParseError(line_no, "duplicate objective entry for \"" + toks[0] + "\"");
            inst.objective[size_t(col)] = value;
          } else {
            auto& entries = col_coeffs[size_t(it->second.index)];
            if (!entries.emplace(col, value).second)
              throw ParseError(line_no, "duplicate coefficient (" + toks[0] + ", " + row_name + ")");
          }
        }
        break;
      }
      case Rhs: {
        if (toks.size() != 3 && toks.size() != 5)
          throw ParseError(line_no, "RHS entry needs 1 or 2 (row, value) pairs");
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          auto it = rows.find(toks[k]);
          if (it == rows.end())
            throw ParseError(line_no, "unknown row \"" + toks[k] + "\"");
          if (it->second.type == 'N')
            throw UnsupportedMpsFeature("objective-row RHS constant");
          rhs_by_row[size_t(it->second.index)] = parse_mps_number(toks[k + 1], line_no);
        }
        break;
      }
      case Ranges: {
        if (toks.size() != 3 && toks.size() != 5)
          throw ParseError(line_no, "RANGES entry needs 1 or 2 (row, value) pairs");
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          auto it = rows.find(toks[k]);
          if (it == rows.end())
            throw ParseError(line_no, "unknown row \"" + toks[k] + "\"");
          if (it->second.type == 'N')
            throw ParseError(line_no, "range on the objective row");
          it->second.range = parse_mps_number(toks[k + 1], line_no);
          it->second.has_range = true;
        }
        break;
      }
      case Bounds: {
        const std::string& btype = toks[0];
        const bool needs_value = btype == "UP" || btype == "LO" || btype == "FX" ||
                                 btype == "UI" || btype == "LI";
        if (toks.size() != (needs_value ? 4u : 3u))
          throw ParseError(line_no, "malformed BOUNDS entry");
        auto it = col_index.find(toks[2]);
        if (it == col_index.end())
          throw ParseError(line_no, "unknown column \"" + toks[2] + "\"");
        const size_t j = size_t(it->second);
        const double v = needs_value ? parse_mps_number(toks[3], line_no) : 0.0;
        auto mark_int = [&] {
          if (!inst.is_integer(int(j))) inst.integrality.push_back(int(j));
        };
        if (btype == "UP") {
          inst.var_upper[j] = v;
        } else if (btype == "LO") {
          inst.var_lower[j] = v;
        } else if (btype == "FX") {
          inst.var_lower[j] = inst.var_upper[j] = v;
        } else if (btype == "FR") {
          inst.var_lower[j] = -kInf;
          inst.var_upper[j] = kInf;
        } else if (btype == "MI") {
          inst.var_lower[j] = -kInf;
        } else if (btype == "PL") {
          inst.var_upper[j] = kInf;
        } else if (btype == "BV") {
          inst.var_lower[j] = 0.0;
          inst.var_upper[j] = 1.0;
          mark_int();
        } else if (btype == "UI") {
          inst.var_upper[j] = v;
          mark_int();
        } else if (btype == "LI") {
          inst.var_lower[j] = v;
          mark_int();
        } else {
          throw UnsupportedMpsFeature("bound type " + btype);
        }
        break;
      }
      case None:
        throw ParseError(line_no, "data before any section header");
      case Done:
        break;
    }
  }

  if (obj_row_name.empty())
    throw ParseError(line_no, "no objective (N) row declared");

  inst.n_vars = int(inst.objective.size());
  for (size_t i = 0; i < row_order.size(); ++i) {
    const MpsRow& mr = rows[row_order[i]];
    Row r;
    for (const auto& [col, val] : col_coeffs[i]) r.coeffs.emplace_back(col, val);
    r.rhs = rhs_by_row[i];
    r.relation = mr.type == 'L'   ? Relation::LE
                 : mr.type == 'G' ? Relation::GE
                                  : Relation::EQ;
    if (!mr.has_range || mr.range == 0.0) {
      inst.rows.push_back(std::move(r));
      continue;
    }
    // A range turns one row into the interval [lo, hi]:
    //   L: [rhs-|r|, rhs]   G: [rhs, rhs+|r|]
    //   E: r>0 -> [rhs, rhs+r], r<0 -> [rhs+r, rhs]
    double lo, hi;
    if (mr.type == 'L') {
      hi = r.rhs;
      lo = r.rhs - std::fabs(mr.range);
    } else if (mr.type == 'G') {
      lo = r.rhs;
      hi = r.rhs + std::fabs(mr.range);
    } else {
      lo = mr.range > 0 ? r.rhs : r.rhs + mr.range;
      hi = mr.range > 0 ? r.rhs + mr.range : r.rhs;
    }
    Row upper = r;
    upper.relation = Relation::LE;
    upper.rhs = hi;
    Row lower = std::move(r);
    lower.relation = Relation::GE;
    lower.rhs = lo;
    inst.rows.push_back(std::move(upper));
    inst.rows.push_back(std::move(lower));
  }
  if (inst.n_vars == 0) throw ParseError(line_no, "no columns declared");
  return inst;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CutlabError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CutlabError("cannot write file: " + path);
  out << content;
  if (!out) throw CutlabError("short write: " + path);
}

MilpInstance load_instance_file(const std::string& path, const std::string& format) {
  std::string fmt = format;
  if (fmt == "auto") {
    const auto dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    fmt = (ext == "mps" || ext == "MPS") ? "mps" : "json";
  }
  const std::string text = read_text_file(path);
  if (fmt == "mps") return read_mps_instance(text);
  if (fmt == "json") return read_json_instance(text);
  throw CutlabError("unknown instance format: " + fmt);
}

}  // namespace cutlab
