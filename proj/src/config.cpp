#include "ergolab/config.hpp"

#include <cmath>
#include <fstream>

namespace ergolab {

using nlohmann::json;

static config_error at(const std::string& path, const std::string& msg) {
  return config_error(path + ": " + msg);
}

static const json& require_field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw at(path + "." + key, "missing required field");
  return j.at(key);
}

static std::uint64_t parse_u64(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return std::uint64_t(v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      return std::stoull(v.get<std::string>());
    } catch (...) {
      throw at(path, "expected a nonnegative integer");
    }
  }
  throw at(path, "expected a nonnegative integer");
}

static double parse_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw at(path, "expected a number");
  return v.get<double>();
}

Rat parse_rat(const json& v, const std::string& path) {
  if (v.is_number_integer()) return Rat(i128(v.get<std::int64_t>()));
  if (v.is_number_unsigned()) return Rat(i128(v.get<std::uint64_t>()));
  if (v.is_number_float()) {
    double x = v.get<double>();
    if (!std::isfinite(x)) throw at(path, "value must be finite");
    i128 den = 1;
    int guard = 0;
    while (x != std::floor(x)) {
      x *= 2;
      den = checked_mul(den, 2);
      if (++guard > 80) throw at(path, "value has no short binary expansion");
    }
    if (std::fabs(x) > 9e18) throw at(path, "value out of range");
    return Rat(i128(std::llround(x)), den);
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      auto slash = s.find('/');
      if (slash != std::string::npos)
        return Rat(parse_i128(s.substr(0, slash)), parse_i128(s.substr(slash + 1)));
      auto dot = s.find('.');
      if (dot != std::string::npos) {
        const std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
        if (tail.size() > 30) throw at(path, "too many decimal digits");
        i128 den = 1;
        for (std::size_t i = 0; i < tail.size(); ++i) den = checked_mul(den, 10);
        const bool neg = !head.empty() && head[0] == '-';
        i128 whole = head.empty() || head == "-" || head == "+" ? i128(0) : parse_i128(head);
        i128 frac = tail.empty() ? i128(0) : parse_i128(tail);
        i128 num = checked_add(checked_mul(abs128(whole), den), frac);
        return Rat(neg ? checked_neg(num) : num, den);
      }
      return Rat(parse_i128(s));
    } catch (const config_error&) {
      throw;
    } catch (const std::exception& e) {
      throw at(path, std::string("bad rational literal '") + s + "': " + e.what());
    }
  }
  throw at(path, "expected a rational (number, 'a/b', or decimal string)");
}

std::uint64_t parse_fixed_point(const json& v, const std::string& path) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    // pinned irrational angles, as 64-bit fixed-point fractions
    if (s == "golden") return 0x9E3779B97F4A7C15ull;    // frac(golden ratio)
    if (s == "golden2") return 4354685564936845354ull;  // frac(2 * golden ratio)
    if (s == "sqrt2") return 0x6A09E667F3BCC908ull;     // frac(sqrt 2)
    Rat r = parse_rat(v, path);
    if (r.num < 0 || r > Rat(1)) throw at(path, "fraction must lie in [0, 1]");
    if (r.den > (i128(1) << 62)) throw at(path, "fraction denominator too fine");
    return std::uint64_t((u128(r.num) << 64) / u128(r.den));
  }
  if (v.is_number_float()) {
    Rat r = parse_rat(v, path);
    if (r.num < 0 || r > Rat(1)) throw at(path, "fraction must lie in [0, 1]");
    return std::uint64_t((u128(r.num) << 64) / u128(r.den));
  }
  return parse_u64(v, path);  // raw fixed-point value
}

static GroupElement parse_group_element(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw at(path, "expected a nonempty coordinate array");
  std::vector<i128> coords;
  coords.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& c = v[i];
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (c.is_number_integer()) coords.push_back(i128(c.get<std::int64_t>()));
    else if (c.is_number_unsigned()) coords.push_back(i128(c.get<std::uint64_t>()));
    else if (c.is_string()) coords.push_back(parse_i128(c.get<std::string>()));
    else throw at(p, "expected an integer coordinate");
  }
  return GroupElement(std::move(coords));
}

static json group_element_to_json(const GroupElement& g) {
  json arr = json::array();
  for (i128 c : g.coords) {
    if (c >= i128(-9'000'000'000'000'000'000ll) && c <= i128(9'000'000'000'000'000'000ll))
      arr.push_back(std::int64_t(c));
    else
      arr.push_back(to_string_i128(c));
  }
  return arr;
}

static IntPoly parse_poly(const json& v, const std::string& path) {
  if (!v.is_array()) throw at(path, "expected a coefficient array (lowest power first)");
  std::vector<i128> coeffs;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& c = v[i];
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (c.is_number_integer()) coeffs.push_back(i128(c.get<std::int64_t>()));
    else if (c.is_number_unsigned()) coeffs.push_back(i128(c.get<std::uint64_t>()));
    else if (c.is_string()) coeffs.push_back(parse_i128(c.get<std::string>()));
    else throw at(p, "expected an integer coefficient");
  }
  IntPoly poly(std::move(coeffs));
  if (poly.degree() > 6) throw at(path, "polynomial degree capped at 6");
  return poly;
}

static json poly_to_json(const IntPoly& p) {
  json arr = json::array();
  for (i128 c : p.coeffs) {
    if (c >= i128(-9'000'000'000'000'000'000ll) && c <= i128(9'000'000'000'000'000'000ll))
      arr.push_back(std::int64_t(c));
    else
      arr.push_back(to_string_i128(c));
  }
  return arr;
}

PolynomialFamily parse_family(const json& v, const std::string& path) {
  if (!v.is_object()) throw at(path, "expected a family object");
  if (v.contains("generators")) {
    const json& gens = require_field(v, "generators", path);
    const json& polys = require_field(v, "polys", path);
    if (!gens.is_array() || !polys.is_array() || gens.size() != polys.size() || gens.empty())
      throw at(path, "generators and polys must be equal-length nonempty arrays");
    std::size_t d = 0;
    std::vector<std::size_t> g;
    for (std::size_t j = 0; j < gens.size(); ++j) {
      std::uint64_t gi = parse_u64(gens[j], path + ".generators[" + std::to_string(j) + "]");
      if (gi < 1) throw at(path + ".generators", "generator indices are 1-based");
      g.push_back(std::size_t(gi - 1));
      d = std::max(d, std::size_t(gi));
    }
    if (v.contains("d")) d = std::max<std::size_t>(d, parse_u64(v["d"], path + ".d"));
    std::vector<IntPoly> ps;
    for (std::size_t j = 0; j < polys.size(); ++j)
      ps.push_back(parse_poly(polys[j], path + ".polys[" + std::to_string(j) + "]"));
    return PolynomialFamily::single_generator(d, std::move(ps), std::move(g));
  }
  const json& cols = require_field(v, "columns", path);
  if (!cols.is_array() || cols.empty()) throw at(path + ".columns", "expected a nonempty array");
  const std::size_t m = cols.size();
  std::size_t d = 0;
  std::vector<std::vector<IntPoly>> columns;
  for (std::size_t j = 0; j < m; ++j) {
    const json& col = cols[j];
    const std::string p = path + ".columns[" + std::to_string(j) + "]";
    if (!col.is_array() || col.empty()) throw at(p, "expected an array of row polynomials");
    if (j == 0) d = col.size();
    if (col.size() != d) throw at(p, "all columns must list the same number of rows");
    std::vector<IntPoly> rows;
    for (std::size_t i = 0; i < d; ++i)
      rows.push_back(parse_poly(col[i], p + "[" + std::to_string(i) + "]"));
    columns.push_back(std::move(rows));
  }
  std::vector<IntPoly> entries(d * m);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < m; ++j) entries[i * m + j] = columns[j][i];
  return PolynomialFamily(d, m, std::move(entries));
}

json family_to_json(const PolynomialFamily& fam) {
  json out = json::object();
  if (fam.generator_assignment) {
    json gens = json::array(), polys = json::array();
    for (std::size_t j = 0; j < fam.m; ++j) {
      const std::size_t row = (*fam.generator_assignment)[j];
      gens.push_back(row + 1);
      polys.push_back(poly_to_json(fam.at(row, j)));
    }
    out["d"] = fam.d;
    out["generators"] = gens;
    out["polys"] = polys;
    return out;
  }
  json cols = json::array();
  for (std::size_t j = 0; j < fam.m; ++j) {
    json col = json::array();
    for (std::size_t i = 0; i < fam.d; ++i) col.push_back(poly_to_json(fam.at(i, j)));
    cols.push_back(col);
  }
  out["columns"] = cols;
  return out;
}

// ---------------------------------------------------------------------------
// systems

static BernoulliShiftSystem parse_bernoulli(const json& v, const std::string& path,
                                            std::uint64_t default_seed) {
  const std::size_t d = parse_u64(require_field(v, "d", path), path + ".d");
  const json& probj = require_field(v, "prob", path);
  if (!probj.is_array() || probj.size() < 2) throw at(path + ".prob", "expected >= 2 probabilities");
  std::vector<Rat> prob;
  for (std::size_t i = 0; i < probj.size(); ++i)
    prob.push_back(parse_rat(probj[i], path + ".prob[" + std::to_string(i) + "]"));
  const std::uint64_t seed =
      v.contains("seed") ? parse_u64(v["seed"], path + ".seed") : default_seed;
  try {
    return BernoulliShiftSystem(d, std::move(prob), seed);
  } catch (const std::exception& e) {
    throw at(path, e.what());
  }
}

static TorusRotationSystem parse_torus(const json& v, const std::string& path,
                                       std::uint64_t default_seed) {
  const std::size_t d = parse_u64(require_field(v, "d", path), path + ".d");
  const std::size_t k = parse_u64(require_field(v, "k", path), path + ".k");
  const json& aj = require_field(v, "alphas", path);
  if (!aj.is_array() || aj.size() != d)
    throw at(path + ".alphas", "expected one row of angles per acting generator");
  std::vector<std::uint64_t> alphas;
  for (std::size_t i = 0; i < d; ++i) {
    const json& row = aj[i];
    const std::string p = path + ".alphas[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != k) throw at(p, "expected k angles");
    for (std::size_t c = 0; c < k; ++c)
      alphas.push_back(parse_fixed_point(row[c], p + "[" + std::to_string(c) + "]"));
  }
  const std::uint64_t seed =
      v.contains("seed") ? parse_u64(v["seed"], path + ".seed") : default_seed;
  try {
    return TorusRotationSystem(d, k, std::move(alphas), seed);
  } catch (const std::exception& e) {
    throw at(path, e.what());
  }
}

static SystemInstance parse_system(const json& v, const std::string& path,
                                   std::uint64_t master_seed) {
  const std::string type = require_field(v, "type", path).get<std::string>();
  if (type == "bernoulli") return parse_bernoulli(v, path, master_seed);
  if (type == "torus") return parse_torus(v, path, master_seed);
  if (type == "product") {
    BernoulliShiftSystem b = parse_bernoulli(require_field(v, "bernoulli", path),
                                             path + ".bernoulli", mix64(master_seed ^ 1));
    TorusRotationSystem t =
        parse_torus(require_field(v, "torus", path), path + ".torus", mix64(master_seed ^ 2));
    try {
      return ProductSystem(std::move(b), std::move(t));
    } catch (const std::exception& e) {
      throw at(path, e.what());
    }
  }
  throw at(path + ".type", "unknown system type '" + type + "'");
}

static json rat_to_json(const Rat& r) { return to_string(r); }

static json system_to_json(const SystemInstance& sys) {
  json out = json::object();
  if (const auto* b = std::get_if<BernoulliShiftSystem>(&sys)) {
    out["type"] = "bernoulli";
    out["d"] = b->d;
    json prob = json::array();
    for (const Rat& p : b->prob) prob.push_back(rat_to_json(p));
    out["prob"] = prob;
    out["seed"] = b->master_seed;
    return out;
  }
  if (const auto* t = std::get_if<TorusRotationSystem>(&sys)) {
    out["type"] = "torus";
    out["d"] = t->d;
    out["k"] = t->k;
    json rows = json::array();
    for (std::size_t i = 0; i < t->d; ++i) {
      json row = json::array();
      for (std::size_t c = 0; c < t->k; ++c) row.push_back(t->alphas[i * t->k + c]);
      rows.push_back(row);
    }
    out["alphas"] = rows;
    out["seed"] = t->master_seed;
    return out;
  }
  const auto& p = std::get<ProductSystem>(sys);
  out["type"] = "product";
  out["bernoulli"] = system_to_json(SystemInstance(p.first));
  out["torus"] = system_to_json(SystemInstance(p.second));
  return out;
}

// ---------------------------------------------------------------------------
// observables

static std::size_t system_alphabet(const SystemInstance& sys, const std::string& path) {
  if (const auto* b = std::get_if<BernoulliShiftSystem>(&sys)) return b->alphabet;
  if (const auto* p = std::get_if<ProductSystem>(&sys)) return p->first.alphabet;
  throw at(path, "cylinder observables need a Bernoulli factor in the system");
}

static CylinderObservable parse_cylinder(const json& v, const std::string& path,
                                         std::size_t alphabet) {
  const std::string type = require_field(v, "type", path).get<std::string>();
  if (type == "constant")
    return CylinderObservable::constant(parse_rat(require_field(v, "value", path), path + ".value"),
                                        alphabet);
  const json& wj = require_field(v, "window", path);
  if (!wj.is_array() || wj.empty()) throw at(path + ".window", "expected coordinates");
  std::vector<GroupElement> window;
  for (std::size_t i = 0; i < wj.size(); ++i)
    window.push_back(parse_group_element(wj[i], path + ".window[" + std::to_string(i) + "]"));
  try {
    if (type == "indicator") {
      const json& sj = require_field(v, "symbols", path);
      std::vector<int> symbols;
      for (std::size_t i = 0; i < sj.size(); ++i)
        symbols.push_back(int(parse_u64(sj[i], path + ".symbols[" + std::to_string(i) + "]")));
      return CylinderObservable::indicator(std::move(window), symbols, alphabet);
    }
    if (type == "cylinder") {
      const json& tj = require_field(v, "table", path);
      std::vector<Rat> table;
      for (std::size_t i = 0; i < tj.size(); ++i)
        table.push_back(parse_rat(tj[i], path + ".table[" + std::to_string(i) + "]"));
      return CylinderObservable::from_exact_table(std::move(window), std::move(table), alphabet);
    }
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw at(path, e.what());
  }
  throw at(path + ".type", "expected a Bernoulli-factor observable, got '" + type + "'");
}

static TorusObservable parse_torus_observable(const json& v, const std::string& path) {
  const std::string type = require_field(v, "type", path).get<std::string>();
  TorusObservable out;
  try {
    if (type == "box") {
      const json& lj = require_field(v, "lo", path);
      const json& wj = require_field(v, "width", path);
      if (!lj.is_array() || !wj.is_array() || lj.size() != wj.size() || lj.empty())
        throw at(path, "box needs equal-length lo and width arrays");
      std::vector<std::uint64_t> lo, width;
      for (std::size_t i = 0; i < lj.size(); ++i) {
        lo.push_back(parse_fixed_point(lj[i], path + ".lo[" + std::to_string(i) + "]"));
        width.push_back(parse_fixed_point(wj[i], path + ".width[" + std::to_string(i) + "]"));
      }
      out = TorusObservable::box(std::move(lo), std::move(width));
    } else if (type == "character") {
      const json& fj = require_field(v, "freq", path);
      if (!fj.is_array() || fj.empty()) throw at(path + ".freq", "expected a frequency vector");
      std::vector<std::int64_t> freq;
      for (const auto& f : fj) freq.push_back(f.get<std::int64_t>());
      out = TorusObservable::character(std::move(freq));
      if (v.contains("phase_offset"))
        std::get<TorusCharacter>(out.kind).phase_offset =
            parse_fixed_point(v["phase_offset"], path + ".phase_offset");
    } else {
      throw at(path + ".type", "expected a torus observable, got '" + type + "'");
    }
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw at(path, e.what());
  }
  if (v.contains("scale")) {
    Rat s = parse_rat(v["scale"], path + ".scale");
    out.scale_exact = s;
    out.scale = s.to_double();
  }
  return out;
}

static Observable parse_observable(const json& v, const std::string& path,
                                   const SystemInstance& sys) {
  const std::string type = require_field(v, "type", path).get<std::string>();
  if (type == "product") {
    if (!std::holds_alternative<ProductSystem>(sys))
      throw at(path, "product observables need a product system");
    CylinderObservable u = parse_cylinder(require_field(v, "cylinder", path), path + ".cylinder",
                                          system_alphabet(sys, path));
    TorusObservable t = parse_torus_observable(require_field(v, "torus", path), path + ".torus");
    return ProductObservable{std::move(u), std::move(t)};
  }
  if (type == "box" || type == "character") {
    if (!std::holds_alternative<TorusRotationSystem>(sys) &&
        !std::holds_alternative<ProductSystem>(sys))
      throw at(path, "torus observables need a torus factor");
    return parse_torus_observable(v, path);
  }
  return parse_cylinder(v, path, system_alphabet(sys, path));
}

static json cylinder_to_json(const CylinderObservable& f) {
  json out = json::object();
  if (f.window.empty()) {
    out["type"] = "constant";
    out["value"] = f.table_exact ? rat_to_json((*f.table_exact)[0]) : json(f.table[0]);
    return out;
  }
  out["type"] = "cylinder";
  json window = json::array();
  for (const auto& w : f.window) window.push_back(group_element_to_json(w));
  out["window"] = window;
  json table = json::array();
  if (f.table_exact)
    for (const Rat& r : *f.table_exact) table.push_back(rat_to_json(r));
  else
    for (double d : f.table) table.push_back(d);
  out["table"] = table;
  return out;
}

static json torus_observable_to_json(const TorusObservable& v) {
  json out = json::object();
  if (const auto* b = std::get_if<TorusBox>(&v.kind)) {
    out["type"] = "box";
    out["lo"] = b->lo;
    out["width"] = b->width;
  } else {
    const auto& ch = std::get<TorusCharacter>(v.kind);
    out["type"] = "character";
    out["freq"] = ch.freq;
    if (ch.phase_offset != 0) out["phase_offset"] = ch.phase_offset;
  }
  if (v.scale_exact) {
    if (*v.scale_exact != Rat(1)) out["scale"] = rat_to_json(*v.scale_exact);
  } else if (v.scale != 1.0) {
    out["scale"] = v.scale;
  }
  return out;
}

static json observable_to_json(const Observable& obs) {
  if (const auto* f = std::get_if<CylinderObservable>(&obs)) return cylinder_to_json(*f);
  if (const auto* v = std::get_if<TorusObservable>(&obs)) return torus_observable_to_json(*v);
  const auto& p = std::get<ProductObservable>(obs);
  json out = json::object();
  out["type"] = "product";
  out["cylinder"] = cylinder_to_json(p.u);
  out["torus"] = torus_observable_to_json(p.v);
  return out;
}

// ---------------------------------------------------------------------------
// top level

static CheckpointSchedule parse_schedule(const json& v, const std::string& path) {
  try {
    if (v.is_object() && v.contains("geometric")) {
      const json& g = v["geometric"];
      return CheckpointSchedule::geometric(parse_u64(require_field(g, "first", path + ".geometric"),
                                                     path + ".geometric.first"),
                                           parse_u64(require_field(g, "factor", path + ".geometric"),
                                                     path + ".geometric.factor"),
                                           parse_u64(require_field(g, "max", path + ".geometric"),
                                                     path + ".geometric.max"));
    }
    const json& cj = v.is_object() ? require_field(v, "checkpoints", path) : v;
    if (!cj.is_array()) throw at(path, "expected a checkpoint array or geometric spec");
    std::vector<std::uint64_t> cps;
    for (std::size_t i = 0; i < cj.size(); ++i)
      cps.push_back(parse_u64(cj[i], path + "[" + std::to_string(i) + "]"));
    return CheckpointSchedule(std::move(cps));
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw at(path, e.what());
  }
}

static WeightSequence parse_weight_sequence(const json& v, const std::string& path) {
  const std::string kind = require_field(v, "kind", path).get<std::string>();
  try {
    if (kind == "constant")
      return WeightSequence::constant(parse_double(require_field(v, "value", path), path + ".value"));
    if (kind == "alternating") return WeightSequence::alternating();
    if (kind == "periodic" || kind == "table") {
      const json& vals = require_field(v, "values", path);
      std::vector<double> values;
      for (const auto& x : vals) values.push_back(x.get<double>());
      if (kind == "periodic") return WeightSequence::periodic(std::move(values));
      return WeightSequence::table(std::move(values),
                                   parse_double(require_field(v, "mean", path), path + ".mean"));
    }
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw at(path, e.what());
  }
  throw at(path + ".kind", "unknown weight sequence kind '" + kind + "'");
}

static json weight_sequence_to_json(const WeightSequence& w) {
  json out = json::object();
  switch (w.kind) {
    case WeightSequence::Kind::Constant:
      out["kind"] = "constant";
      out["value"] = w.constant_value;
      break;
    case WeightSequence::Kind::Alternating:
      out["kind"] = "alternating";
      break;
    case WeightSequence::Kind::Periodic:
      out["kind"] = "periodic";
      out["values"] = w.values;
      break;
    case WeightSequence::Kind::Table:
      out["kind"] = "table";
      out["values"] = w.values;
      out["mean"] = w.declared_mean;
      break;
  }
  return out;
}

static PastWeights parse_past_weights(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw at(path, "expected a nonempty weight array");
  std::vector<std::int64_t> w;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& x = v[i];
    if (!x.is_number_integer() && !x.is_number_unsigned())
      throw at(path + "[" + std::to_string(i) + "]", "expected a positive integer");
    w.push_back(x.get<std::int64_t>());
  }
  try {
    return PastWeights(std::move(w));
  } catch (const std::exception& e) {
    throw at(path, e.what());
  }
}

ExperimentConfig parse_config(const json& j, std::optional<std::uint64_t> seed_override) {
  if (!j.is_object()) throw config_error("config: expected a JSON object");
  ExperimentConfig c;
  c.experiment = require_field(j, "experiment", "config").get<std::string>();
  static const char* kinds[] = {"cesaro",  "weighted",      "prime",       "reduction_gap",
                                "maximal", "orthogonality", "verify_past", "entropy"};
  bool known = false;
  for (const char* k : kinds) known = known || c.experiment == k;
  if (!known) throw at("config.experiment", "unknown experiment kind '" + c.experiment + "'");

  c.master_seed = j.contains("master_seed") ? parse_u64(j["master_seed"], "config.master_seed") : 0;
  if (seed_override) c.master_seed = *seed_override;

  if (j.contains("system")) c.system = parse_system(j["system"], "config.system", c.master_seed);
  if (j.contains("family")) {
    c.family = parse_family(j["family"], "config.family");
    if (c.family->max_degree() > 6) throw at("config.family", "family degree capped at 6");
  }
  if (j.contains("weights")) {
    const json& w = j["weights"];
    if (w.is_string() && w.get<std::string>() == "auto")
      c.auto_weights = true;
    else
      c.explicit_weights = parse_past_weights(w, "config.weights");
  }
  if (j.contains("schedule")) {
    c.schedule = parse_schedule(j["schedule"], "config.schedule");
    if (c.schedule->max_n() > 10'000'000ull)
      throw at("config.schedule", "N capped at 10^7");
  }
  if (j.contains("samples")) {
    const json& s = j["samples"];
    c.samples.count = parse_u64(require_field(s, "count", "config.samples"), "config.samples.count");
    if (c.samples.count < 1) throw at("config.samples.count", "need at least one sample");
    if (s.contains("first_stream_id"))
      c.samples.first_stream_id = parse_u64(s["first_stream_id"], "config.samples.first_stream_id");
  }
  if (j.contains("eps")) c.eps = parse_double(j["eps"], "config.eps");

  if (j.contains("observables")) {
    if (!c.system) throw at("config.system", "observables need a system");
    const json& os = j["observables"];
    if (!os.is_array() || os.empty()) throw at("config.observables", "expected observables");
    for (std::size_t i = 0; i < os.size(); ++i)
      c.observables.push_back(
          parse_observable(os[i], "config.observables[" + std::to_string(i) + "]", *c.system));
  }

  if (j.contains("weight_sequence"))
    c.weight_sequence = parse_weight_sequence(j["weight_sequence"], "config.weight_sequence");

  if (j.contains("k_limit")) {
    const json& k = j["k_limit"];
    KLimitTolerances t;
    if (k.contains("mean_tol")) t.mean_tol = parse_double(k["mean_tol"], "config.k_limit.mean_tol");
    if (k.contains("sample_tol"))
      t.sample_tol = parse_double(k["sample_tol"], "config.k_limit.sample_tol");
    if (k.contains("sample_frac"))
      t.sample_frac = parse_double(k["sample_frac"], "config.k_limit.sample_frac");
    c.k_limit = t;
  }
  if (j.contains("gap_check")) {
    const json& g = j["gap_check"];
    GapCheckSpec s;
    if (g.contains("final_tol")) s.final_tol = parse_double(g["final_tol"], "config.gap_check.final_tol");
    if (g.contains("frac")) s.frac = parse_double(g["frac"], "config.gap_check.frac");
    if (g.contains("median_decreasing")) s.median_decreasing = g["median_decreasing"].get<bool>();
    c.gap_check = s;
  }
  if (j.contains("maximal")) {
    const json& m = j["maximal"];
    MaximalSpec s;
    s.n_max = parse_u64(require_field(m, "n_max", "config.maximal"), "config.maximal.n_max");
    s.p_norm = parse_double(require_field(m, "p_norm", "config.maximal"), "config.maximal.p_norm");
    if (m.contains("ratio_min")) s.ratio_min = parse_double(m["ratio_min"], "config.maximal.ratio_min");
    if (m.contains("ratio_max")) s.ratio_max = parse_double(m["ratio_max"], "config.maximal.ratio_max");
    c.maximal = s;
  }
  if (j.contains("orthogonality")) {
    const json& o = j["orthogonality"];
    OrthogonalitySpec s;
    s.g0 = parse_group_element(require_field(o, "g0", "config.orthogonality"),
                               "config.orthogonality.g0");
    s.column_j = parse_u64(require_field(o, "column_j", "config.orthogonality"),
                           "config.orthogonality.column_j");
    const json& pairs = require_field(o, "pairs", "config.orthogonality");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const json& p = pairs[i];
      const std::string pp = "config.orthogonality.pairs[" + std::to_string(i) + "]";
      if (!p.is_array() || p.size() != 2) throw at(pp, "expected [n, m]");
      s.pairs.emplace_back(parse_u64(p[0], pp + "[0]"), parse_u64(p[1], pp + "[1]"));
    }
    if (o.contains("tolerance")) s.tolerance = parse_double(o["tolerance"], "config.orthogonality.tolerance");
    c.orthogonality = s;
  }
  if (j.contains("entropy")) {
    const json& e = j["entropy"];
    EntropySpec s;
    s.box_side = int(parse_u64(require_field(e, "box_side", "config.entropy"), "config.entropy.box_side"));
    if (e.contains("tolerance")) s.tolerance = parse_double(e["tolerance"], "config.entropy.tolerance");
    c.entropy = s;
  }
  if (j.contains("verify_past")) {
    const json& vp = j["verify_past"];
    VerifyPastSpec s;
    s.box_radius = int(parse_u64(require_field(vp, "box_radius", "config.verify_past"),
                                 "config.verify_past.box_radius"));
    c.verify_past = s;
  }

  // per-experiment shape requirements
  auto need = [&](bool cond, const std::string& path, const std::string& msg) {
    if (!cond) throw at(path, msg);
  };
  const std::string& kind = c.experiment;
  if (kind == "cesaro" || kind == "weighted" || kind == "prime") {
    need(c.system.has_value(), "config.system", "required for " + kind);
    need(!c.observables.empty(), "config.observables", "required for " + kind);
    need(c.family.has_value(), "config.family", "required for " + kind);
    need(c.schedule.has_value(), "config.schedule", "required for " + kind);
    need(c.observables.size() == c.family->m, "config.observables",
         "need exactly one observable per family column");
    if (kind == "weighted")
      need(c.weight_sequence.has_value(), "config.weight_sequence", "required for weighted");
    if (c.k_limit) {
      need(std::holds_alternative<BernoulliShiftSystem>(*c.system), "config.k_limit",
           "limit comparison needs a Bernoulli system");
      // the limit formula assumes nondegeneracy; refuse early
      need(check_nondegeneracy(*c.family).all_ok(), "config.family",
           "limit comparison requires a nondegenerate family");
    }
  } else if (kind == "reduction_gap") {
    need(c.system && std::holds_alternative<ProductSystem>(*c.system), "config.system",
         "reduction_gap needs a product system");
    need(!c.observables.empty(), "config.observables", "required for reduction_gap");
    for (std::size_t i = 0; i < c.observables.size(); ++i)
      need(std::holds_alternative<ProductObservable>(c.observables[i]),
           "config.observables[" + std::to_string(i) + "]",
           "reduction_gap needs product observables");
    need(c.family.has_value(), "config.family", "required for reduction_gap");
    need(c.schedule.has_value(), "config.schedule", "required for reduction_gap");
    need(c.observables.size() == c.family->m, "config.observables",
         "need exactly one observable per family column");
  } else if (kind == "maximal") {
    need(c.system.has_value(), "config.system", "required for maximal");
    need(c.observables.size() == 1, "config.observables", "maximal takes exactly one observable");
    need(c.family && c.family->m == 1, "config.family", "maximal takes a single-column family");
    need(c.maximal.has_value(), "config.maximal", "required for maximal");
  } else if (kind == "orthogonality") {
    need(c.system && std::holds_alternative<BernoulliShiftSystem>(*c.system), "config.system",
         "orthogonality needs a Bernoulli system");
    need(!c.observables.empty(), "config.observables", "required for orthogonality");
    need(c.family.has_value(), "config.family", "required for orthogonality");
    need(c.observables.size() == c.family->m, "config.observables",
         "need exactly one observable per family column");
    need(c.orthogonality.has_value(), "config.orthogonality", "required for orthogonality");
    need(c.auto_weights || c.explicit_weights.has_value(), "config.weights",
         "orthogonality needs weights (explicit or \"auto\")");
    need(c.orthogonality->column_j >= 1 && c.orthogonality->column_j <= c.family->m,
         "config.orthogonality.column_j", "column index out of range (1-based)");
    for (const auto& obs : c.observables)
      need(std::holds_alternative<CylinderObservable>(obs), "config.observables",
           "orthogonality needs cylinder observables");
  } else if (kind == "verify_past") {
    need(c.explicit_weights.has_value(), "config.weights", "verify_past needs explicit weights");
    need(c.verify_past.has_value(), "config.verify_past", "required for verify_past");
  } else if (kind == "entropy") {
    need(c.system && std::holds_alternative<BernoulliShiftSystem>(*c.system), "config.system",
         "entropy needs a Bernoulli system");
    need(c.entropy.has_value(), "config.entropy", "required for entropy");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  return parse_config(j, seed_override);
}

json serialize_config(const ExperimentConfig& c) {
  json out = json::object();
  out["experiment"] = c.experiment;
  out["master_seed"] = c.master_seed;
  if (c.system) out["system"] = system_to_json(*c.system);
  if (!c.observables.empty()) {
    json os = json::array();
    for (const auto& o : c.observables) os.push_back(observable_to_json(o));
    out["observables"] = os;
  }
  if (c.family) out["family"] = family_to_json(*c.family);
  if (c.auto_weights)
    out["weights"] = "auto";
  else if (c.explicit_weights)
    out["weights"] = c.explicit_weights->weights;
  if (c.schedule) out["schedule"] = json{{"checkpoints", c.schedule->checkpoints}};
  out["samples"] = json{{"count", c.samples.count}, {"first_stream_id", c.samples.first_stream_id}};
  out["eps"] = c.eps;
  if (c.weight_sequence) out["weight_sequence"] = weight_sequence_to_json(*c.weight_sequence);
  if (c.k_limit)
    out["k_limit"] = json{{"mean_tol", c.k_limit->mean_tol},
                          {"sample_tol", c.k_limit->sample_tol},
                          {"sample_frac", c.k_limit->sample_frac}};
  if (c.gap_check)
    out["gap_check"] = json{{"final_tol", c.gap_check->final_tol},
                            {"frac", c.gap_check->frac},
                            {"median_decreasing", c.gap_check->median_decreasing}};
  if (c.maximal) {
    json m = json{{"n_max", c.maximal->n_max}, {"p_norm", c.maximal->p_norm}};
    if (c.maximal->ratio_min) m["ratio_min"] = *c.maximal->ratio_min;
    if (c.maximal->ratio_max) m["ratio_max"] = *c.maximal->ratio_max;
    out["maximal"] = m;
  }
  if (c.orthogonality) {
    json pairs = json::array();
    for (auto [n, m] : c.orthogonality->pairs) pairs.push_back(json::array({n, m}));
    out["orthogonality"] = json{{"g0", group_element_to_json(c.orthogonality->g0)},
                                {"column_j", c.orthogonality->column_j},
                                {"pairs", pairs},
                                {"tolerance", c.orthogonality->tolerance}};
  }
  if (c.entropy)
    out["entropy"] = json{{"box_side", c.entropy->box_side}, {"tolerance", c.entropy->tolerance}};
  if (c.verify_past) out["verify_past"] = json{{"box_radius", c.verify_past->box_radius}};
  return out;
}

}  // namespace ergolab
