#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "orbitlab/catalog.hpp"
#include "orbitlab/dynamics.hpp"
#include "orbitlab/errors.hpp"
#include "orbitlab/holomap.hpp"
#include "orbitlab/map_dsl.hpp"
#include "orbitlab/premodel.hpp"
#include "orbitlab/stable_set.hpp"

namespace orbitlab::cli {

namespace {

using Json = nlohmann::ordered_json;

// Usage problems detected after CLI11 has accepted the command line.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string map;
  std::string catalog;
  std::string params;
  std::string format = "plain";
  std::string out;
  int n_max = -1;
  int m_max = -1;
  bool strict = false;
  std::string convention = "doubled";

  std::vector<std::string> points;
  int m = 1;
  std::string direction;
  std::string dir;
  std::string boundary;
  int count = 40;
  std::optional<double> premodel_r;
  std::string premodel_g;
  std::string premodel_tau;
  std::vector<std::string> probes;
  double theta = 0.0;
  double lambda = 2.0;
  std::string catalog_action;
  std::string catalog_name;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  Json doc = Json::object();
  std::optional<Table> table;
  bool inconclusive = false;
};

// ---- formatting --------------------------------------------------------

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

Json jnum(double v) {
  if (!std::isfinite(v)) return num(v);
  return std::stod(num(v));
}

std::string complex_text(Complex c) {
  const double re = c.real();
  const double im = c.imag();
  if (im == 0.0) return num(re);
  const std::string imag = (std::abs(im) == 1.0 ? "" : num(std::abs(im))) + "i";
  if (re == 0.0) return (im < 0 ? "-" : "") + imag;
  return num(re) + (im < 0 ? " - " : " + ") + imag;
}

std::string point_text(const Point& p) {
  std::string s = "(";
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (j) s += ", ";
    s += complex_text(p[j]);
  }
  return s + ")";
}

std::vector<std::string> point_columns(const Point& p) {
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    out.push_back(num(p[j].real()));
    out.push_back(num(p[j].imag()));
  }
  return out;
}

std::vector<std::string> coordinate_header(int dim) {
  std::vector<std::string> out;
  for (int j = 1; j <= dim; ++j) {
    out.push_back("z" + std::to_string(j) + "_re");
    out.push_back("z" + std::to_string(j) + "_im");
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_null()) return "none";
  return v.dump();
}

void flatten(const Json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten(x, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array()) {
    std::size_t i = 0;
    for (const auto& x : v) flatten(x, prefix + "." + std::to_string(i++), out);
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

void render_plain(const Json& v, int indent, std::ostream& os) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  for (const auto& [k, x] : v.items()) {
    const bool scalar_array =
        x.is_array() && std::all_of(x.begin(), x.end(), [](const Json& e) { return e.is_primitive(); });
    if (x.is_primitive()) {
      os << pad << k << ": " << scalar_text(x) << "\n";
    } else if (scalar_array) {
      os << pad << k << ": [";
      bool first = true;
      for (const auto& e : x) {
        os << (first ? "" : ", ") << scalar_text(e);
        first = false;
      }
      os << "]\n";
    } else if (x.is_array()) {
      os << pad << k << ":\n";
      for (const auto& e : x) {
        if (e.is_object()) {
          os << pad << "  -\n";
          render_plain(e, indent + 4, os);
        } else {
          os << pad << "  - " << e.dump() << "\n";
        }
      }
    } else {
      os << pad << k << ":\n";
      render_plain(x, indent + 2, os);
    }
  }
}

void emit(const Report& r, const std::string& format, std::ostream& os) {
  if (format == "structured") {
    os << r.doc.dump(2) << "\n";
  } else if (format == "csv") {
    if (r.table) {
      for (std::size_t i = 0; i < r.table->header.size(); ++i) os << (i ? "," : "") << csv_field(r.table->header[i]);
      os << "\n";
      for (const auto& row : r.table->rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
        os << "\n";
      }
    } else {
      std::vector<std::pair<std::string, std::string>> flat;
      flatten(r.doc, "", flat);
      os << "key,value\n";
      for (const auto& [k, v] : flat) os << csv_field(k) << "," << csv_field(v) << "\n";
    }
  } else {
    Json head = Json::object();
    for (const auto& [k, x] : r.doc.items()) {
      if (!(r.table && x.is_array() && !x.empty() && x.front().is_object())) head[k] = x;
    }
    render_plain(head, 0, os);
    if (r.table) {
      std::vector<std::size_t> width(r.table->header.size(), 0);
      for (std::size_t i = 0; i < width.size(); ++i) width[i] = r.table->header[i].size();
      for (const auto& row : r.table->rows) {
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
      }
      auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          os << (i ? "  " : "") << cells[i];
          if (i + 1 < cells.size()) os << std::string(width[i] - cells[i].size(), ' ');
        }
        os << "\n";
      };
      line(r.table->header);
      for (const auto& row : r.table->rows) line(row);
    }
  }
}

// ---- inputs ------------------------------------------------------------

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

Bindings parse_params(const std::string& text) {
  Bindings out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("parameter '" + item + "' is not of the form name=value");
    const std::string name = trim(item.substr(0, eq));
    const Point v = parse_point(trim(item.substr(eq + 1)));
    if (name.empty() || v.size() != 1) throw UsageError("bad parameter '" + item + "'");
    out[name] = v[0];
  }
  return out;
}

struct Loaded {
  MapDef map;
  std::optional<CatalogEntry> entry;
  Bindings params;
};

Loaded load_map(const RunConfig& cfg) {
  const bool has_map = !cfg.map.empty();
  const bool has_catalog = !cfg.catalog.empty();
  if (has_map == has_catalog) throw UsageError("give exactly one map source: --map or --catalog");
  Loaded l;
  l.params = parse_params(cfg.params);
  if (has_catalog) {
    l.entry = catalog_get(cfg.catalog, l.params);
    l.map = l.entry->map;
  } else {
    l.map = parse_map(cfg.map, l.params);
  }
  return l;
}

Point read_point(const std::string& text, const Loaded& l, const Domain& d) {
  Point p = parse_point(text, l.params);
  if (p.size() != d.dim) {
    throw UsageError("point '" + text + "' has " + std::to_string(p.size()) + " coordinates, " + to_string(d) +
                     " needs " + std::to_string(d.dim));
  }
  return p;
}

std::vector<Point> read_points(const RunConfig& cfg, const Loaded& l, bool allow_default = true) {
  std::vector<Point> out;
  for (const auto& t : cfg.points) out.push_back(read_point(t, l, l.map.domain));
  if (out.empty() && allow_default && l.entry) out.push_back(l.entry->base_point);
  if (out.empty()) throw UsageError("--point is required");
  return out;
}

Settings make_settings(const RunConfig& cfg) {
  Settings s;
  s.convention = cfg.convention == "arctanh" ? Convention::arctanh : Convention::doubled;
  return s;
}

int pick(int value, int fallback) { return value >= 0 ? value : fallback; }

Json map_doc(const MapDef& m) {
  Json j;
  j["name"] = m.name.empty() ? "inline" : m.name;
  j["domain"] = to_string(m.domain);
  j["definition"] = to_string(m);
  return j;
}

// ---- commands ----------------------------------------------------------

Report cmd_orbit(const RunConfig& cfg) {
  const Loaded l = load_map(cfg);
  const Point x = read_points(cfg, l).front();
  const int n = pick(cfg.n_max, 20);
  Settings s = make_settings(cfg);
  s.orbit_cap = std::max(s.orbit_cap, n);
  const bool backward = cfg.direction == "backward";
  const OrbitRecord o = backward ? backward_orbit(l.map, x, n, s) : forward_orbit(l.map, x, n, s);

  Report r;
  r.doc["map"] = map_doc(l.map);
  r.doc["start"] = point_text(x);
  r.doc["direction"] = backward ? "backward" : "forward";
  r.doc["requested"] = n;
  r.doc["computed"] = static_cast<int>(o.points.size()) - 1;
  r.doc["exit_index"] = o.exit_index ? Json(static_cast<int>(*o.exit_index)) : Json();
  r.doc["exit_reason"] = o.exit_index ? Json(o.exit_reason) : Json();
  Json pts = Json::array();
  Table t;
  t.header = {"n"};
  for (const auto& h : coordinate_header(l.map.domain.dim)) t.header.push_back(h);
  if (backward) t.header.push_back("residual");
  for (std::size_t k = 0; k < o.points.size(); ++k) {
    Json p;
    p["n"] = static_cast<int>(k);
    p["point"] = point_text(o.points[k]);
    std::vector<std::string> row{std::to_string(k)};
    for (const auto& c : point_columns(o.points[k])) row.push_back(c);
    if (backward) {
      p["residual"] = jnum(o.residuals[k]);
      row.push_back(num(o.residuals[k]));
    }
    pts.push_back(p);
    t.rows.push_back(std::move(row));
  }
  r.doc["points"] = pts;
  r.table = std::move(t);
  return r;
}

Report cmd_steps(const RunConfig& cfg) {
  const Loaded l = load_map(cfg);
  const Point x = read_points(cfg, l).front();
  const int n_max = pick(cfg.n_max, 64);
  const Settings s = make_settings(cfg);
  const bool forward = cfg.direction == "forward";
  const StepEstimate e = forward ? forward_step(l.map, x, cfg.m, n_max, s) : backward_step(l.map, x, cfg.m, n_max, s);

  Report r;
  r.doc["map"] = map_doc(l.map);
  r.doc["start"] = point_text(x);
  r.doc["direction"] = forward ? "forward" : "backward";
  r.doc["m"] = cfg.m;
  r.doc["n_max"] = n_max;
  r.doc["limit"] = jnum(e.limit);
  r.doc["verdict"] = std::string(to_string(e.verdict));
  r.doc["partial"] = e.partial;
  r.doc["monotonicity_defect"] = jnum(e.monotonicity_defect);
  Json vals = Json::array();
  Table t{{"n", "value"}, {}};
  for (std::size_t n = 0; n < e.values.size(); ++n) {
    vals.push_back(Json{{"n", static_cast<int>(n)}, {"value", jnum(e.values[n])}});
    t.rows.push_back({std::to_string(n), num(e.values[n])});
  }
  r.doc["values"] = vals;
  r.table = std::move(t);
  r.inconclusive = e.verdict == LimitVerdict::inconclusive;
  return r;
}

Report cmd_rate(const RunConfig& cfg) {
  const Loaded l = load_map(cfg);
  const Point x = read_points(cfg, l).front();
  const int m_max = pick(cfg.m_max, 64);
  const double rate = divergence_rate(l.map, x, m_max, make_settings(cfg));
  Report r;
  r.doc["map"] = map_doc(l.map);
  r.doc["start"] = point_text(x);
  r.doc["m_max"] = m_max;
  r.doc["divergence_rate"] = jnum(rate);
  return r;
}

Report cmd_classify(const RunConfig& cfg) {
  const Loaded l = load_map(cfg);
  const Point x = read_points(cfg, l).front();
  Settings s = make_settings(cfg);
  if (cfg.n_max >= 0) s.classify_n_max = cfg.n_max;
  const TypeReport rep = classify_type(l.map, x, s);
  Report r;
  r.doc["map"] = map_doc(l.map);
  r.doc["start"] = point_text(x);
  r.doc["type"] = std::string(to_string(rep.type));
  r.doc["rate"] = jnum(rep.rate);
  r.doc["forward_only"] = rep.forward_only;
  Json ev = Json::array();
  Table t{{"m", "sigma", "increment", "slope"}, {}};
  for (const auto& row : rep.evidence) {
    ev.push_back(Json{{"m", row.m}, {"sigma", jnum(row.sigma)}, {"increment", jnum(row.increment)},
                      {"slope", jnum(row.slope)}});
    t.rows.push_back({std::to_string(row.m), num(row.sigma), num(row.increment), num(row.slope)});
  }
  r.doc["evidence"] = ev;
  r.table = std::move(t);
  r.inconclusive = rep.type == MapType::inconclusive;
  return r;
}

Report cmd_dw(const RunConfig& cfg) {
  const Loaded l = load_map(cfg);
  const std::vector<Point> starts = read_points(cfg, l);
  const int n = pick(cfg.n_max, 200);
  const DWReport rep = denjoy_wolff(l.map, starts, n, make_settings(cfg));
  Report r;
  r.doc["map"] = map_doc(l.map);
  Json st = Json::array();
  for (const auto& p : starts) st.push_back(point_text(p));
  r.doc["starts"] = st;
  r.doc["iterations"] = n;
  r.doc["kind"] = std::string(to_string(rep.kind));
  r.doc["boundary_point"] = rep.kind == DWReport::Kind::boundary ? Json(point_text(rep.point.coords)) : Json();
  r.doc["interior_point"] = rep.interior ? Json(point_text(*rep.interior)) : Json();
  r.doc["dilation"] = rep.kind == DWReport::Kind::boundary ? jnum(rep.dilation) : Json();
  r.doc["converged_starts"] = rep.converged_starts;
  r.doc["diagnostics"] = rep.diagnostics;
  r.inconclusive = rep.kind == DWReport::Kind::inconclusive;
  return r;
}

BoundaryPoint read_boundary(const std::string& text, const Loaded& l) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return BoundaryPoint::at_infinity();
  const Point p = read_point(t, l, l.map.domain);
  const DomainKind k = l.map.domain.kind;
  if (k == DomainKind::disc || k == DomainKind::ball) return BoundaryPoint::unit(p);
  return BoundaryPoint::finite(p);
}

Report cmd_dilation(const RunConfig& cfg) {
  const Loaded l = load_map(cfg);
  if (cfg.boundary.empty()) throw UsageError("--boundary is required");
  const BoundaryPoint zeta = read_boundary(cfg.boundary, l);
  const std::vector<Point> approach = radial_approach(l.map.domain, zeta, cfg.count);
  const double dil = dilation_at(l.map, zeta, approach, make_settings(cfg));
  Report r;
  r.doc["map"] = map_doc(l.map);
  r.doc["boundary"] = trim(cfg.boundary);
  r.doc["chart_point"] = point_text(boundary_to_ball(l.map.domain, zeta));
  r.doc["approach_points"] = cfg.count;
  r.doc["dilation"] = jnum(dil);
  return r;
}

Report cmd_partition(const RunConfig& cfg) {
  const Loaded l = load_map(cfg);
  const std::vector<Point> samples = read_points(cfg, l);
  const int n_max = pick(cfg.n_max, 16);
  const Partition p = partition(l.map, samples, n_max, make_settings(cfg));
  Report r;
  r.doc["map"] = map_doc(l.map);
  r.doc["n_max"] = n_max;
  Json cls = Json::array();
  for (std::size_t c = 0; c < p.classes.size(); ++c) {
    Json members = Json::array();
    for (auto m : p.classes[c].members) members.push_back(static_cast<int>(m));
    cls.push_back(Json{{"class", static_cast<int>(c)}, {"members", members}, {"mu", jnum(p.classes[c].mu)}});
  }
  r.doc["classes"] = cls;
  Json unres = Json::array();
  for (auto i : p.unresolved) unres.push_back(static_cast<int>(i));
  r.doc["unresolved"] = unres;
  Json ns = Json::array();
  for (auto i : p.non_stable) ns.push_back(static_cast<int>(i));
  r.doc["non_stable"] = ns;
  Json matrix = Json::array();
  for (const auto& row : p.verdicts) {
    Json jr = Json::array();
    for (auto v : row) jr.push_back(std::string(to_string(v)));
    matrix.push_back(jr);
  }
  r.doc["verdicts"] = matrix;
  r.doc["diagnostics"] = p.diagnostics;

  Table t{{"sample", "point", "class", "mu"}, {}};
  Json rows = Json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::string cls_text;
    std::string mu = "";
    if (p.class_of[i]) {
      cls_text = std::to_string(*p.class_of[i]);
      mu = num(p.classes[*p.class_of[i]].mu);
    } else if (std::find(p.non_stable.begin(), p.non_stable.end(), i) != p.non_stable.end()) {
      cls_text = "non-stable";
    } else {
      cls_text = "unresolved";
    }
    t.rows.push_back({std::to_string(i), point_text(samples[i]), cls_text, mu});
    rows.push_back(Json{{"sample", static_cast<int>(i)}, {"point", point_text(samples[i])}, {"class", cls_text}});
  }
  r.doc["samples"] = rows;
  r.table = std::move(t);
  r.inconclusive = !p.unresolved.empty();
  return r;
}

Json verdict_doc(const BoundednessVerdict& v, Table& t, const char* column) {
  Json j;
  j["verdict"] = std::string(to_string(v.verdict));
  j["bound_estimate"] = v.bound_estimate ? jnum(*v.bound_estimate) : Json();
  j["reason"] = v.reason;
  Json series = Json::array();
  t.header = {"n", column};
  for (std::size_t k = 0; k < v.series.size(); ++k) {
    series.push_back(Json{{"n", static_cast<int>(v.indices[k])}, {column, jnum(v.series[k])}});
    t.rows.push_back({std::to_string(v.indices[k]), num(v.series[k])});
  }
  j["series"] = series;
  return j;
}

Report cmd_tangent(const RunConfig& cfg) {
  const Loaded l = load_map(cfg);
  const Point base = read_points(cfg, l).front();
  if (cfg.dir.empty()) throw UsageError("--dir is required");
  const Point dir = read_point(cfg.dir, l, l.map.domain);
  const int n_max = pick(cfg.n_max, 40);
  const BoundednessVerdict v = tangent_bounded(l.map, {base, dir}, n_max, make_settings(cfg));
  Report r;
  r.doc["map"] = map_doc(l.map);
  r.doc["base"] = point_text(base);
  r.doc["direction"] = point_text(dir);
  r.doc["n_max"] = n_max;
  Table t;
  const Json verdict = verdict_doc(v, t, "kappa");
  for (const auto& [k, x] : verdict.items()) r.doc[k] = x;
  r.table = std::move(t);
  r.inconclusive = v.verdict == Boundedness::inconclusive;
  return r;
}

Report cmd_verify_premodel(const RunConfig& cfg) {
  const Loaded l = load_map(cfg);
  PreModel pm;
  const bool explicit_pm = !cfg.premodel_g.empty() || !cfg.premodel_tau.empty();
  if (cfg.premodel_r && explicit_pm) throw UsageError("--premodel-r excludes --premodel-g/--premodel-tau");
  if (cfg.premodel_r) {
    pm = siegel_example_premodel(*cfg.premodel_r);
  } else if (!cfg.premodel_g.empty() && !cfg.premodel_tau.empty()) {
    pm.g = parse_embedding(cfg.premodel_g, l.params);
    pm.tau = parse_map(cfg.premodel_tau, l.params);
    pm.Z = pm.g.source;
    pm.name = "custom";
  } else {
    throw UsageError("give --premodel-r or both --premodel-g and --premodel-tau");
  }
  std::vector<Point> probes;
  for (const auto& t : cfg.probes) {
    Point p = parse_point(t, l.params);
    if (p.size() != pm.Z.dim) throw UsageError("probe '" + t + "' has the wrong dimension");
    probes.push_back(std::move(p));
  }
  if (probes.empty()) probes = default_premodel_probes();
  const int m_max = pick(cfg.m_max, 20);
  const PreModelReport rep = verify_premodel(l.map, pm, probes, m_max, {}, make_settings(cfg));

  Report r;
  r.doc["map"] = map_doc(l.map);
  r.doc["premodel"] = pm.name;
  r.doc["m_max"] = m_max;
  r.doc["intertwining_residual"] = jnum(rep.intertwining);
  r.doc["max_step_residual"] = jnum(rep.max_step_residual);
  r.doc["collisions"] = rep.collisions;
  r.doc["passed"] = rep.passed;
  r.doc["diagnostics"] = rep.diagnostics;
  Json rows = Json::array();
  Table t{{"probe", "step_residual"}, {}};
  for (std::size_t i = 0; i < probes.size(); ++i) {
    rows.push_back(Json{{"probe", point_text(probes[i])}, {"step_residual", jnum(rep.step_residual[i])}});
    t.rows.push_back({point_text(probes[i]), num(rep.step_residual[i])});
  }
  r.doc["probes"] = rows;
  r.table = std::move(t);
  r.inconclusive = !rep.passed;
  return r;
}

Report cmd_sigma_formula(const RunConfig& cfg) {
  const int first = cfg.m_max >= 0 ? 1 : cfg.m;
  const int last = cfg.m_max >= 0 ? cfg.m_max : cfg.m;
  Report r;
  r.doc["theta"] = jnum(cfg.theta);
  r.doc["lambda"] = jnum(cfg.lambda);
  Json rows = Json::array();
  Table t{{"m", "sigma", "sigma_over_m"}, {}};
  for (int m = first; m <= last; ++m) {
    const double v = sigma_closed_form(cfg.theta, cfg.lambda, m);
    rows.push_back(Json{{"m", m}, {"sigma", jnum(v)}, {"sigma_over_m", jnum(v / m)}});
    t.rows.push_back({std::to_string(m), num(v), num(v / m)});
  }
  r.doc["values"] = rows;
  r.table = std::move(t);
  return r;
}

Json truth_doc(const CatalogEntry& e) {
  const TruthRecord& tr = e.truth;
  const Domain& d = e.map.domain;
  Json j = Json::object();
  auto with_basis = [&](const std::string& key, Json value) {
    Json f;
    f["value"] = std::move(value);
    const auto it = tr.provenance.find(key);
    if (it != tr.provenance.end()) {
      f["basis"] = std::string(to_string(it->second.basis));
      if (!it->second.oracle.empty()) f["oracle"] = it->second.oracle;
    }
    j[key] = std::move(f);
  };
  if (tr.type) with_basis("type", std::string(to_string(*tr.type)));
  if (tr.rate) with_basis("rate", jnum(*tr.rate));
  if (tr.dw_point) with_basis("dw_point", point_text(*tr.dw_point));
  if (tr.dw_dilation) with_basis("dw_dilation", jnum(*tr.dw_dilation));
  if (tr.interior_fixed_point) with_basis("interior_fixed_point", point_text(*tr.interior_fixed_point));
  if (tr.repelling_point) {
    const BoundaryPoint& b = *tr.repelling_point;
    with_basis("repelling_point", b.form == BoundaryPoint::Form::infinity ? Json("infinity")
                                                                          : Json(point_text(boundary_to_ball(d, b))));
  }
  if (tr.repelling_dilation) with_basis("repelling_dilation", jnum(*tr.repelling_dilation));
  if (!tr.stable_set.empty()) with_basis("stable_set", tr.stable_set);
  return j;
}

Report cmd_catalog(const RunConfig& cfg) {
  Report r;
  if (cfg.catalog_action.empty()) throw UsageError("catalog needs an action: list or show");
  if (cfg.catalog_action == "list") {
    Json entries = Json::array();
    Table t{{"name", "parameters", "description"}, {}};
    for (const auto& name : catalog_names()) {
      const CatalogEntry e = catalog_get(name);
      std::string params;
      for (const auto& p : e.params) params += (params.empty() ? "" : " ") + p.name + "=" + complex_text(p.default_value);
      entries.push_back(Json{{"name", name}, {"parameters", params}, {"description", e.description}});
      t.rows.push_back({name, params, e.description});
    }
    r.doc["entries"] = entries;
    r.table = std::move(t);
    return r;
  }
  if (cfg.catalog_name.empty()) throw UsageError("catalog show needs an entry name");
  const CatalogEntry e = catalog_get(cfg.catalog_name, parse_params(cfg.params));
  r.doc["name"] = e.name;
  r.doc["description"] = e.description;
  Json params = Json::array();
  for (const auto& p : e.params) {
    params.push_back(Json{{"name", p.name}, {"value", complex_text(e.values.at(p.name))},
                          {"default", complex_text(p.default_value)}, {"range", p.range}});
  }
  r.doc["parameters"] = params;
  r.doc["map"] = to_string(e.map);
  r.doc["base_point"] = point_text(e.base_point);
  r.doc["truth"] = truth_doc(e);
  return r;
}

// ---- command line ------------------------------------------------------

void add_point(CLI::App* sub, RunConfig& cfg, const std::string& what) {
  sub->add_option("--point", cfg.points, what)->take_all();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Numerical experiments on backward orbits of holomorphic self-maps", "orbitlab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--map-file", "", "Config file with `key = value` lines using the long flag names");
  app.add_option("--map", cfg.map, "Map in the map grammar, e.g. \"siegel 2 : (2*z1 + i*z2^2, z2)\"");
  app.add_option("--catalog", cfg.catalog, "Catalog entry name (see `orbitlab catalog list`)");
  app.add_option("--params", cfg.params, "Parameter bindings: name=value[,name=value...]");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "structured", "plain"}));
  app.add_option("--out", cfg.out, "Write the report to this file instead of stdout");
  app.add_option("--n-max", cfg.n_max, "Orbit depth / number of steps")->check(CLI::NonNegativeNumber);
  app.add_option("--m-max", cfg.m_max, "Largest m for rate-type sweeps")->check(CLI::PositiveNumber);
  app.add_flag("--strict", cfg.strict, "Exit with status 1 when the analysis is inconclusive");
  app.add_option("--convention", cfg.convention, "Distance normalization")
      ->check(CLI::IsMember({"doubled", "arctanh"}));

  auto* orbit = app.add_subcommand("orbit", "Forward or backward orbit of a point");
  add_point(orbit, cfg, "Start point");
  orbit->add_option("--direction", cfg.direction, "forward (default) or backward")
      ->check(CLI::IsMember({"forward", "backward"}));

  auto* steps = app.add_subcommand("steps", "Step sequence k(f^-(n+m) x, f^-n x) and its limit sigma_m");
  add_point(steps, cfg, "Start point");
  steps->add_option("--m", cfg.m, "Step length")->check(CLI::PositiveNumber);
  steps->add_option("--direction", cfg.direction, "backward (default) or forward")
      ->check(CLI::IsMember({"forward", "backward"}));

  auto* rate = app.add_subcommand("rate", "Divergence rate min_j k(x, f^j x) / j");
  add_point(rate, cfg, "Start point");

  auto* classify = app.add_subcommand("classify", "Elliptic / parabolic / hyperbolic classification");
  add_point(classify, cfg, "Point on a backward orbit");

  auto* dw = app.add_subcommand("dw", "Denjoy-Wolff point and dilation from forward orbits");
  add_point(dw, cfg, "Start points (repeatable)");

  auto* dilation = app.add_subcommand("dilation", "Boundary dilation along a radial approach");
  dilation->add_option("--boundary", cfg.boundary,
                       "Boundary point: unit vector for disc/ball, coordinates or `inf` otherwise");
  dilation->add_option("--count", cfg.count, "Number of approach points")->check(CLI::PositiveNumber);

  auto* part = app.add_subcommand("stable-partition", "Group samples into classes of bounded backward distance");
  add_point(part, cfg, "Samples (repeatable)");

  auto* tangent = app.add_subcommand("tangent", "Boundedness of the Kobayashi metric along a backward orbit");
  add_point(tangent, cfg, "Base point");
  tangent->add_option("--dir", cfg.dir, "Tangent vector");

  auto* verify = app.add_subcommand("verify-premodel", "Check a pre-model against the map");
  verify->add_option("--premodel-r", cfg.premodel_r, "Use the shear example's pre-model through (i r^2, i r)");
  verify->add_option("--premodel-g", cfg.premodel_g, "Embedding, e.g. \"siegel 1 -> siegel 2 : (z1, 0)\"");
  verify->add_option("--premodel-tau", cfg.premodel_tau, "Automorphism of Z, e.g. \"siegel 1 : (2*z1)\"");
  verify->add_option("--probe", cfg.probes, "Probe points in Z (repeatable)")->take_all();

  auto* sigma = app.add_subcommand("sigma-formula", "Closed-form sigma_m near a boundary repelling point");
  sigma->add_option("--theta", cfg.theta, "Approach angle in (-pi/2, pi/2)");
  sigma->add_option("--lambda", cfg.lambda, "Boundary dilation, > 1");
  sigma->add_option("--m", cfg.m, "Step length (ignored when --m-max is given)")->check(CLI::PositiveNumber);

  auto* cat = app.add_subcommand("catalog", "List catalog entries or show one");
  // Checked in the handler so that unknown flags are reported first.
  cat->add_option("action", cfg.catalog_action, "list or show")
      ->check(CLI::IsMember({"list", "show"}));
  cat->add_option("name", cfg.catalog_name, "Entry name for `show`");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Report report;
  try {
    if (*orbit) report = cmd_orbit(cfg);
    else if (*steps) report = cmd_steps(cfg);
    else if (*rate) report = cmd_rate(cfg);
    else if (*classify) report = cmd_classify(cfg);
    else if (*dw) report = cmd_dw(cfg);
    else if (*dilation) report = cmd_dilation(cfg);
    else if (*part) report = cmd_partition(cfg);
    else if (*tangent) report = cmd_tangent(cfg);
    else if (*verify) report = cmd_verify_premodel(cfg);
    else if (*sigma) report = cmd_sigma_formula(cfg);
    else report = cmd_catalog(cfg);
  } catch (const UsageError& e) {
    err << "orbitlab: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "orbitlab: parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const CatalogError& e) {
    err << "orbitlab: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "orbitlab: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "orbitlab: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "orbitlab: analysis failed: " << e.what() << "\n";
    return kAnalysisFailure;
  }

  if (cfg.out.empty()) {
    emit(report, cfg.format, out);
  } else {
    std::ofstream file(cfg.out);
    if (!file) {
      err << "orbitlab: cannot write " << cfg.out << "\n";
      return kUsage;
    }
    emit(report, cfg.format, file);
  }
  return report.inconclusive && cfg.strict ? kInconclusive : kOk;
}

}  // namespace orbitlab::cli
