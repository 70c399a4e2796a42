#include "ergolab/systems.hpp"

#include <algorithm>
#include <cmath>

namespace ergolab {

// ---------------------------------------------------------------------------
// Bernoulli shift

BernoulliShiftSystem::BernoulliShiftSystem(std::size_t d_, std::vector<Rat> prob_,
                                           std::uint64_t seed)
    : d(d_), alphabet(prob_.size()), prob(std::move(prob_)), master_seed(seed) {
  if (d < 1 || d > 16) throw std::runtime_error("bernoulli system dimension must be in [1,16]");
  if (alphabet < 2) throw std::runtime_error("bernoulli alphabet must have size >= 2");
  Rat cum = 0;
  double total = 0;
  cum_threshold_.reserve(alphabet);
  for (const Rat& p : prob) {
    if (p.num < 0) throw std::runtime_error("probabilities must be nonnegative");
    total += p.to_double();
    cum += p;
    if (cum.den > (i128(1) << 62))
      throw std::runtime_error("probability denominators too fine for 64-bit thresholds");
    cum_threshold_.push_back((u128(cum.num) << 64) / u128(cum.den));
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::runtime_error("probability vector must sum to 1 within 1e-12");
  // the last bucket absorbs any rounding slack in the cumulative sum
  cum_threshold_.back() = u128(1) << 64;
}

BernoulliPoint BernoulliShiftSystem::sample(std::uint64_t stream_id) const {
  return BernoulliPoint{point_seed_for(master_seed, stream_id), GroupElement::zero(d)};
}

int BernoulliShiftSystem::symbol_at_absolute(std::uint64_t point_seed,
                                             const GroupElement& absolute) const {
  std::uint64_t h = point_seed;
  for (i128 c : absolute.coords) h = absorb_coordinate(h, c);
  const u128 hv = h;
  // inverse CDF over half-open cumulative intervals
  std::size_t lo = 0, hi = alphabet - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (hv < cum_threshold_[mid])
      hi = mid;
    else
      lo = mid + 1;
  }
  return int(lo);
}

int BernoulliShiftSystem::symbol_at(const BernoulliPoint& x, const GroupElement& relative) const {
  return symbol_at_absolute(x.point_seed, x.offset + relative);
}

// ---------------------------------------------------------------------------
// torus rotation

TorusRotationSystem::TorusRotationSystem(std::size_t d_, std::size_t k_,
                                         std::vector<std::uint64_t> alphas_, std::uint64_t seed)
    : d(d_), k(k_), alphas(std::move(alphas_)), master_seed(seed) {
  if (d < 1 || d > 16) throw std::runtime_error("torus system dimension must be in [1,16]");
  if (k < 1 || k > 16) throw std::runtime_error("torus dimension must be in [1,16]");
  if (alphas.size() != d * k) throw std::runtime_error("torus rotation needs d*k angle entries");
}

TorusPoint TorusRotationSystem::sample(std::uint64_t stream_id) const {
  const std::uint64_t ps = point_seed_for(master_seed, stream_id);
  TorusPoint x;
  x.coords.resize(k);
  for (std::size_t c = 0; c < k; ++c) x.coords[c] = mix64(ps ^ mix64(std::uint64_t(c)));
  return x;
}

std::uint64_t TorusRotationSystem::displacement(const GroupElement& g, std::size_t c) const {
  if (g.dim() != d) throw dimension_mismatch("torus action dimension mismatch");
  std::uint64_t delta = 0;  // arithmetic mod 2^64 is the exact rotation
  for (std::size_t i = 0; i < d; ++i)
    delta += static_cast<std::uint64_t>(static_cast<u128>(g.coords[i])) * alphas[i * k + c];
  return delta;
}

ProductSystem::ProductSystem(BernoulliShiftSystem f, TorusRotationSystem s)
    : first(std::move(f)), second(std::move(s)) {
  if (first.d != second.d) throw std::runtime_error("product factors must share the acting dimension");
}

// ---------------------------------------------------------------------------
// system dispatch

std::size_t acting_dimension(const SystemInstance& sys) {
  return std::visit([](const auto& s) -> std::size_t {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, ProductSystem>)
      return s.first.d;
    else
      return s.d;
  }, sys);
}

Point sample_point(const SystemInstance& sys, std::uint64_t stream_id) {
  return std::visit([&](const auto& s) -> Point {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, ProductSystem>)
      return ProductPoint{s.first.sample(stream_id), s.second.sample(stream_id)};
    else
      return s.sample(stream_id);
  }, sys);
}

static void act_bernoulli(const GroupElement& g, BernoulliPoint& x) { add_in_place(x.offset, g); }

static void act_torus(const TorusRotationSystem& s, const GroupElement& g, TorusPoint& x) {
  for (std::size_t c = 0; c < s.k; ++c) x.coords[c] += s.displacement(g, c);
}

void act_in_place(const SystemInstance& sys, const GroupElement& g, Point& x) {
  if (const auto* b = std::get_if<BernoulliShiftSystem>(&sys)) {
    if (g.dim() != b->d) throw dimension_mismatch("action dimension mismatch");
    act_bernoulli(g, std::get<BernoulliPoint>(x));
  } else if (const auto* t = std::get_if<TorusRotationSystem>(&sys)) {
    act_torus(*t, g, std::get<TorusPoint>(x));
  } else {
    const auto& p = std::get<ProductSystem>(sys);
    auto& px = std::get<ProductPoint>(x);
    if (g.dim() != p.first.d) throw dimension_mismatch("action dimension mismatch");
    act_bernoulli(g, px.first);
    act_torus(p.second, g, px.second);
  }
}

Point act(const SystemInstance& sys, const GroupElement& g, const Point& x) {
  Point y = x;
  act_in_place(sys, g, y);
  return y;
}

// ---------------------------------------------------------------------------
// observables

static std::size_t checked_table_size(std::size_t alphabet, std::size_t window_size) {
  if (window_size > 24) throw std::runtime_error("cylinder window larger than 24 coordinates");
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < window_size; ++i) {
    size *= alphabet;
    if (size > (1ull << 24)) throw std::runtime_error("cylinder table exceeds 2^24 entries");
  }
  return std::size_t(size);
}

static void require_distinct_window(const std::vector<GroupElement>& window) {
  for (std::size_t i = 0; i < window.size(); ++i)
    for (std::size_t j = i + 1; j < window.size(); ++j)
      if (window[i] == window[j]) throw std::runtime_error("cylinder window coordinates must be distinct");
}

void CylinderObservable::refresh_bound() {
  bound = 0;
  for (double v : table) bound = std::max(bound, std::fabs(v));
}

CylinderObservable CylinderObservable::constant(Rat value, std::size_t alphabet) {
  CylinderObservable f;
  f.alphabet = alphabet;
  f.table = {value.to_double()};
  f.table_exact = std::vector<Rat>{value};
  f.refresh_bound();
  return f;
}

CylinderObservable CylinderObservable::indicator(std::vector<GroupElement> window,
                                                 const std::vector<int>& symbols,
                                                 std::size_t alphabet) {
  if (symbols.size() != window.size())
    throw std::runtime_error("indicator needs one symbol per window coordinate");
  require_distinct_window(window);
  const std::size_t size = checked_table_size(alphabet, window.size());
  std::size_t idx = 0, stride = 1;
  for (std::size_t kpos = 0; kpos < symbols.size(); ++kpos) {
    if (symbols[kpos] < 0 || std::size_t(symbols[kpos]) >= alphabet)
      throw std::runtime_error("indicator symbol out of alphabet range");
    idx += stride * std::size_t(symbols[kpos]);
    stride *= alphabet;
  }
  CylinderObservable f;
  f.window = std::move(window);
  f.alphabet = alphabet;
  f.table.assign(size, 0.0);
  f.table[idx] = 1.0;
  std::vector<Rat> exact(size, Rat(0));
  exact[idx] = Rat(1);
  f.table_exact = std::move(exact);
  f.bound = 1.0;
  return f;
}

CylinderObservable CylinderObservable::from_exact_table(std::vector<GroupElement> window,
                                                        std::vector<Rat> exact,
                                                        std::size_t alphabet) {
  require_distinct_window(window);
  const std::size_t size = checked_table_size(alphabet, window.size());
  if (exact.size() != size) throw std::runtime_error("cylinder table size mismatch");
  CylinderObservable f;
  f.window = std::move(window);
  f.alphabet = alphabet;
  f.table.resize(size);
  for (std::size_t i = 0; i < size; ++i) f.table[i] = exact[i].to_double();
  f.table_exact = std::move(exact);
  f.refresh_bound();
  return f;
}

CylinderObservable CylinderObservable::from_table(std::vector<GroupElement> window,
                                                  std::vector<double> table, std::size_t alphabet) {
  require_distinct_window(window);
  const std::size_t size = checked_table_size(alphabet, window.size());
  if (table.size() != size) throw std::runtime_error("cylinder table size mismatch");
  CylinderObservable f;
  f.window = std::move(window);
  f.alphabet = alphabet;
  f.table = std::move(table);
  f.refresh_bound();
  return f;
}

TorusObservable TorusObservable::box(std::vector<std::uint64_t> lo, std::vector<std::uint64_t> width) {
  if (lo.size() != width.size()) throw std::runtime_error("box lo/width length mismatch");
  TorusObservable v;
  v.kind = TorusBox{std::move(lo), std::move(width)};
  return v;
}

TorusObservable TorusObservable::character(std::vector<std::int64_t> freq) {
  TorusObservable v;
  v.kind = TorusCharacter{std::move(freq), 0};
  return v;
}

double TorusObservable::bound() const { return std::fabs(scale); }

// ---------------------------------------------------------------------------
// evaluation

static double eval_cylinder(const CylinderObservable& f, const BernoulliShiftSystem& sys,
                            const BernoulliPoint& x) {
  if (f.alphabet != sys.alphabet)
    throw incompatible_observable("cylinder alphabet differs from system alphabet");
  std::size_t idx = 0, stride = 1;
  for (const GroupElement& w : f.window) {
    idx += stride * std::size_t(sys.symbol_at(x, w));
    stride *= f.alphabet;
  }
  return f.table[idx];
}

static double eval_torus(const TorusObservable& v, const TorusPoint& x) {
  if (const auto* b = std::get_if<TorusBox>(&v.kind)) {
    if (b->lo.size() != x.coords.size()) throw incompatible_observable("box dimension mismatch");
    for (std::size_t c = 0; c < b->lo.size(); ++c)
      if (x.coords[c] - b->lo[c] >= b->width[c]) return 0.0;  // wrap-around interval test
    return v.scale;
  }
  const auto& ch = std::get<TorusCharacter>(v.kind);
  if (ch.freq.size() != x.coords.size()) throw incompatible_observable("character dimension mismatch");
  std::uint64_t phase = ch.phase_offset;
  for (std::size_t c = 0; c < ch.freq.size(); ++c)
    phase += static_cast<std::uint64_t>(ch.freq[c]) * x.coords[c];
  const double angle = double(phase) * 0x1p-64 * 2.0 * M_PI;
  return v.scale * std::cos(angle);
}

double evaluate(const Observable& obs, const SystemInstance& sys, const Point& x) {
  if (const auto* f = std::get_if<CylinderObservable>(&obs)) {
    if (const auto* b = std::get_if<BernoulliShiftSystem>(&sys))
      return eval_cylinder(*f, *b, std::get<BernoulliPoint>(x));
    if (const auto* p = std::get_if<ProductSystem>(&sys))
      return eval_cylinder(*f, p->first, std::get<ProductPoint>(x).first);
    throw incompatible_observable("cylinder observable needs a Bernoulli factor");
  }
  if (const auto* v = std::get_if<TorusObservable>(&obs)) {
    if (std::holds_alternative<TorusRotationSystem>(sys))
      return eval_torus(*v, std::get<TorusPoint>(x));
    if (std::holds_alternative<ProductSystem>(sys))
      return eval_torus(*v, std::get<ProductPoint>(x).second);
    throw incompatible_observable("torus observable needs a torus factor");
  }
  const auto& po = std::get<ProductObservable>(obs);
  const auto* p = std::get_if<ProductSystem>(&sys);
  if (!p) throw incompatible_observable("product observable needs a product system");
  const auto& px = std::get<ProductPoint>(x);
  return eval_cylinder(po.u, p->first, px.first) * eval_torus(po.v, px.second);
}

double observable_bound(const Observable& obs) {
  if (const auto* f = std::get_if<CylinderObservable>(&obs)) return f->bound;
  if (const auto* v = std::get_if<TorusObservable>(&obs)) return v->bound();
  const auto& po = std::get<ProductObservable>(obs);
  return po.u.bound * po.v.bound();
}

// ---------------------------------------------------------------------------
// integrals

Rat integral_cylinder_exact(const CylinderObservable& f, const std::vector<Rat>& prob) {
  if (!f.table_exact) throw std::runtime_error("cylinder observable has no exact table");
  const std::size_t n = f.table.size();
  Rat total = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    Rat weight = 1;
    std::size_t rest = idx;
    for (std::size_t kpos = 0; kpos < f.window.size(); ++kpos) {
      weight *= prob[rest % f.alphabet];
      rest /= f.alphabet;
    }
    total += weight * (*f.table_exact)[idx];
  }
  return total;
}

double integral_cylinder(const CylinderObservable& f, const std::vector<Rat>& prob) {
  std::vector<double> p(prob.size());
  for (std::size_t i = 0; i < prob.size(); ++i) p[i] = prob[i].to_double();
  const std::size_t n = f.table.size();
  double total = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    double weight = 1;
    std::size_t rest = idx;
    for (std::size_t kpos = 0; kpos < f.window.size(); ++kpos) {
      weight *= p[rest % f.alphabet];
      rest /= f.alphabet;
    }
    total += weight * f.table[idx];
  }
  return total;
}

static Rat integral_torus_exact(const TorusObservable& v) {
  if (!v.scale_exact) throw std::runtime_error("torus observable has no exact scale");
  if (const auto* b = std::get_if<TorusBox>(&v.kind)) {
    Rat vol = 1;
    for (std::uint64_t w : b->width) vol *= Rat(i128(w), i128(1) << 64);
    return *v.scale_exact * vol;
  }
  const auto& ch = std::get<TorusCharacter>(v.kind);
  for (std::int64_t fr : ch.freq)
    if (fr != 0) return Rat(0);
  if (ch.phase_offset != 0)
    throw std::runtime_error("phase-shifted constant character has no rational integral");
  return *v.scale_exact;
}

static double integral_torus(const TorusObservable& v) {
  if (const auto* b = std::get_if<TorusBox>(&v.kind)) {
    double vol = 1;
    for (std::uint64_t w : b->width) vol *= double(w) * 0x1p-64;
    return v.scale * vol;
  }
  const auto& ch = std::get<TorusCharacter>(v.kind);
  for (std::int64_t fr : ch.freq)
    if (fr != 0) return 0.0;
  return v.scale * std::cos(double(ch.phase_offset) * 0x1p-64 * 2.0 * M_PI);
}

Rat integral_exact(const Observable& obs, const SystemInstance& sys) {
  if (const auto* f = std::get_if<CylinderObservable>(&obs)) {
    if (const auto* b = std::get_if<BernoulliShiftSystem>(&sys))
      return integral_cylinder_exact(*f, b->prob);
    if (const auto* p = std::get_if<ProductSystem>(&sys))
      return integral_cylinder_exact(*f, p->first.prob);
    throw incompatible_observable("cylinder observable needs a Bernoulli factor");
  }
  if (const auto* v = std::get_if<TorusObservable>(&obs)) return integral_torus_exact(*v);
  const auto& po = std::get<ProductObservable>(obs);
  const auto* p = std::get_if<ProductSystem>(&sys);
  if (!p) throw incompatible_observable("product observable needs a product system");
  return integral_cylinder_exact(po.u, p->first.prob) * integral_torus_exact(po.v);
}

double integral(const Observable& obs, const SystemInstance& sys) {
  if (const auto* f = std::get_if<CylinderObservable>(&obs)) {
    if (const auto* b = std::get_if<BernoulliShiftSystem>(&sys))
      return integral_cylinder(*f, b->prob);
    if (const auto* p = std::get_if<ProductSystem>(&sys))
      return integral_cylinder(*f, p->first.prob);
    throw incompatible_observable("cylinder observable needs a Bernoulli factor");
  }
  if (const auto* v = std::get_if<TorusObservable>(&obs)) return integral_torus(*v);
  const auto& po = std::get<ProductObservable>(obs);
  const auto* p = std::get_if<ProductSystem>(&sys);
  if (!p) throw incompatible_observable("product observable needs a product system");
  return integral_cylinder(po.u, p->first.prob) * integral_torus(po.v);
}

// ---------------------------------------------------------------------------
// translation and projection

CylinderObservable translate_cylinder(const CylinderObservable& f, const GroupElement& t) {
  CylinderObservable g = f;
  for (auto& w : g.window) w = w + t;
  return g;
}

static TorusObservable translate_torus(const TorusObservable& v, const TorusRotationSystem& sys,
                                       const GroupElement& t) {
  TorusObservable out = v;
  if (auto* b = std::get_if<TorusBox>(&out.kind)) {
    for (std::size_t c = 0; c < b->lo.size(); ++c) b->lo[c] -= sys.displacement(t, c);
  } else {
    auto& ch = std::get<TorusCharacter>(out.kind);
    for (std::size_t c = 0; c < ch.freq.size(); ++c)
      ch.phase_offset += static_cast<std::uint64_t>(ch.freq[c]) * sys.displacement(t, c);
  }
  return out;
}

Observable translate(const Observable& obs, const SystemInstance& sys, const GroupElement& t) {
  if (const auto* f = std::get_if<CylinderObservable>(&obs)) return translate_cylinder(*f, t);
  if (const auto* v = std::get_if<TorusObservable>(&obs)) {
    if (const auto* ts = std::get_if<TorusRotationSystem>(&sys)) return translate_torus(*v, *ts, t);
    if (const auto* p = std::get_if<ProductSystem>(&sys)) return translate_torus(*v, p->second, t);
    throw incompatible_observable("torus observable needs a torus factor");
  }
  const auto& po = std::get<ProductObservable>(obs);
  const auto* p = std::get_if<ProductSystem>(&sys);
  if (!p) throw incompatible_observable("product observable needs a product system");
  return ProductObservable{translate_cylinder(po.u, t), translate_torus(po.v, p->second, t)};
}

TorusObservable pinsker_project(const ProductObservable& obs, const ProductSystem& sys) {
  TorusObservable out = obs.v;
  if (obs.u.table_exact && obs.v.scale_exact) {
    out.scale_exact = *obs.v.scale_exact * integral_cylinder_exact(obs.u, sys.first.prob);
    out.scale = out.scale_exact->to_double();
  } else {
    out.scale = obs.v.scale * integral_cylinder(obs.u, sys.first.prob);
    out.scale_exact.reset();
  }
  return out;
}

}  // namespace ergolab
