#include "subcausal/io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "subcausal/errors.hpp"

namespace subcausal {

namespace {

long checked_count(double v, const std::string& where) {
  if (!(v >= 0.0)) throw DataError("negative count in " + where);
  if (std::fabs(v - std::round(v)) > 1e-9) throw DataError("non-integer count in " + where);
  return static_cast<long>(std::llround(v));
}

int checked_index(const nlohmann::json& j, const char* key, int upper, const std::string& where) {
  if (!j.contains(key)) throw DataError("missing field '" + std::string(key) + "' in " + where);
  if (!j[key].is_number_integer()) throw DataError("field '" + std::string(key) + "' must be an integer in " + where);
  const int v = j[key].get<int>();
  if (v < 0 || v >= upper)
    throw DataError("field '" + std::string(key) + "' out of range in " + where);
  return v;
}

}  // namespace

ObservedTable ingest_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("top-level JSON value must be an object");
  const int J = doc.value("J", 2);
  const int K = doc.value("K", 2);
  if (J < 2 || K < 2 || J > 64 || K > 64) throw DataError("J and K must be in [2, 64]");
  ObservedTable table(J, K);
  if (doc.contains("observed")) {
    if (!doc["observed"].is_array()) throw DataError("'observed' must be an array");
    for (const auto& row : doc["observed"]) {
      const int t = checked_index(row, "t", 2, "observed");
      const int x = checked_index(row, "x", J, "observed");
      const int y = checked_index(row, "y", K, "observed");
      if (!row.contains("n")) throw DataError("missing count 'n' in observed row");
      table.obs(t, x, y) += static_cast<double>(checked_count(row["n"].get<double>(), "observed"));
    }
  }
  if (doc.contains("missing")) {
    if (!doc["missing"].is_array()) throw DataError("'missing' must be an array");
    for (const auto& row : doc["missing"]) {
      if (row.contains("x")) throw DataError("covariate value present on a missing-x row");
      const int t = checked_index(row, "t", 2, "missing");
      const int y = checked_index(row, "y", K, "missing");
      if (!row.contains("n")) throw DataError("missing count 'n' in missing row");
      table.mis(t, y) += static_cast<double>(checked_count(row["n"].get<double>(), "missing"));
    }
  }
  table.validate();
  return table;
}

ObservedTable ingest_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV input");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
      if (ch == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur += ch;
      }
    }
    out.push_back(cur);
    return out;
  };
  const auto header = split(line);
  if (header.size() != 5 || header[0] != "t" || header[1] != "x" || header[2] != "y" ||
      header[3] != "m" || header[4] != "n")
    throw DataError("CSV header must be exactly: t,x,y,m,n");

  struct Row {
    int t, y, m;
    std::string x;
    long n;
  };
  std::vector<Row> rows;
  int max_x = 1, max_y = 1;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != 5) throw DataError("line " + std::to_string(lineno) + ": expected 5 fields");
    Row r;
    try {
      r.t = std::stoi(f[0]);
      r.y = std::stoi(f[2]);
      r.m = std::stoi(f[3]);
      r.n = checked_count(std::stod(f[4]), "line " + std::to_string(lineno));
      r.x = f[1];
      if (r.m == 0 && !r.x.empty()) {
        const int x = std::stoi(r.x);
        if (x < 0) throw DataError("line " + std::to_string(lineno) + ": index out of range");
        max_x = std::max(max_x, x);
      }
    } catch (const DataError&) {
      throw;
    } catch (const std::logic_error&) {
      throw DataError("line " + std::to_string(lineno) + ": malformed number");
    }
    if (r.t < 0 || r.t > 1 || r.m < 0 || r.m > 1 || r.y < 0)
      throw DataError("line " + std::to_string(lineno) + ": index out of range");
    if (r.m == 1 && !r.x.empty())
      throw DataError("line " + std::to_string(lineno) + ": covariate value present with m=1");
    if (r.m == 0 && r.x.empty())
      throw DataError("line " + std::to_string(lineno) + ": missing covariate with m=0");
    max_y = std::max(max_y, r.y);
    rows.push_back(std::move(r));
  }
  ObservedTable table(max_x + 1, max_y + 1);
  for (const auto& r : rows) {
    if (r.m == 0)
      table.obs(r.t, std::stoi(r.x), r.y) += static_cast<double>(r.n);
    else
      table.mis(r.t, r.y) += static_cast<double>(r.n);
  }
  table.validate();
  return table;
}

ObservedTable load_table(const std::string& path, const std::string& format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::string fmt = format;
  if (fmt == "auto") {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
      fmt = "csv";
    else if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
      fmt = "json";
    else {
      const auto first = text.find_first_not_of(" \t\r\n");
      fmt = (first != std::string::npos && text[first] == '{') ? "json" : "csv";
    }
  }
  if (fmt == "json") return ingest_json(text);
  if (fmt == "csv") return ingest_csv(text);
  throw DataError("unknown format: " + format);
}

ObservedTable fixture(const std::string& name) {
  if (name == "icd_trial") {
    // defibrillator trial counts: complete (t,x,y) cells and missing (t,y) margins
    ObservedTable t(2, 2);
    t.obs(0, 0, 0) = 4;
    t.obs(0, 0, 1) = 0;
    t.obs(0, 1, 0) = 6;
    t.obs(0, 1, 1) = 2;
    t.obs(1, 0, 0) = 311;
    t.obs(1, 0, 1) = 62;
    t.obs(1, 1, 0) = 190;
    t.obs(1, 1, 1) = 20;
    t.mis(0, 0) = 382;
    t.mis(0, 1) = 95;
    t.mis(1, 0) = 136;
    t.mis(1, 1) = 23;
    return t;
  }
  throw DataError("unknown fixture: " + name);
}

std::vector<std::string> fixture_names() { return {"icd_trial"}; }

nlohmann::ordered_json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::ordered_json table_to_json(const ObservedTable& table) {
  nlohmann::ordered_json j;
  j["J"] = table.J;
  j["K"] = table.K;
  auto observed = nlohmann::ordered_json::array();
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < table.J; ++x)
      for (int y = 0; y < table.K; ++y)
        observed.push_back({{"t", t}, {"x", x}, {"y", y}, {"n", table.obs(t, x, y)}});
  auto missing = nlohmann::ordered_json::array();
  for (int t = 0; t < 2; ++t)
    for (int y = 0; y < table.K; ++y)
      missing.push_back({{"t", t}, {"y", y}, {"n", table.mis(t, y)}});
  j["observed"] = std::move(observed);
  j["missing"] = std::move(missing);
  return j;
}

nlohmann::ordered_json joint_to_json(const JointDistribution& joint) {
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < joint.J; ++x)
      for (int y = 0; y < joint.K; ++y)
        for (int m = 0; m < 2; ++m)
          cells.push_back(
              {{"t", t}, {"x", x}, {"y", y}, {"m", m}, {"p", json_number(joint.cell(t, x, y, m))}});
  return cells;
}

std::string table_digest(const ObservedTable& table) {
  std::ostringstream canon;
  canon << table.J << ':' << table.K;
  canon.setf(std::ios::fixed);
  canon.precision(6);
  for (double v : table.n_obs) canon << ':' << v;
  for (double v : table.n_mis) canon << ':' << v;
  const std::string s = canon.str();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream hex;
  hex << std::hex << h;
  return hex.str();
}

}  // namespace subcausal
