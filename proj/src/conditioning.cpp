#include "ergolab/conditioning.hpp"

#include <algorithm>
#include <cmath>

namespace ergolab {

bool CoordSet::contains(const GroupElement& h) const {
  if (hull) {
    bool listed = false;
    for (const auto& c : *hull)
      if (c == h) { listed = true; break; }
    if (!listed) return false;
  }
  if (const auto* e = std::get_if<ExplicitSet>(&kind)) {
    for (const auto& c : e->coords)
      if (c == h) return true;
    return false;
  }
  const auto& hs = std::get<PastHalfSpace>(kind);
  return phi_leq(hs.w, hs.g, h);
}

static std::size_t pow_size(std::size_t base, std::size_t exp, std::size_t cap,
                            const char* what) {
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    size *= base;
    if (size > cap) throw std::runtime_error(what);
  }
  return std::size_t(size);
}

CylinderObservable condition_cylinder(const CylinderObservable& f, const CoordSet& S,
                                      const std::vector<Rat>& prob) {
  const std::size_t a = f.alphabet;
  if (prob.size() != a) throw std::runtime_error("probability vector length must equal alphabet");

  std::vector<std::size_t> kept_pos, dropped_pos;
  for (std::size_t k = 0; k < f.window.size(); ++k)
    (S.contains(f.window[k]) ? kept_pos : dropped_pos).push_back(k);

  const std::size_t dropped_size =
      pow_size(a, dropped_pos.size(), 1ull << 24, "conditioning would average over more than 2^24 assignments");
  const std::size_t kept_size = f.table.size() / dropped_size;

  // strides of the original table indexed by window position
  std::vector<std::size_t> stride(f.window.size());
  {
    std::size_t s = 1;
    for (std::size_t k = 0; k < f.window.size(); ++k) {
      stride[k] = s;
      s *= a;
    }
  }

  std::vector<GroupElement> kept_window;
  kept_window.reserve(kept_pos.size());
  for (std::size_t k : kept_pos) kept_window.push_back(f.window[k]);

  std::vector<double> pd(a);
  for (std::size_t s = 0; s < a; ++s) pd[s] = prob[s].to_double();

  std::vector<double> table(kept_size, 0.0);
  for (std::size_t ki = 0; ki < kept_size; ++ki) {
    std::size_t base = 0, rest = ki;
    for (std::size_t kk = 0; kk < kept_pos.size(); ++kk) {
      base += (rest % a) * stride[kept_pos[kk]];
      rest /= a;
    }
    double acc = 0;
    for (std::size_t di = 0; di < dropped_size; ++di) {
      std::size_t idx = base, drest = di;
      double weight = 1;
      for (std::size_t dd = 0; dd < dropped_pos.size(); ++dd) {
        const std::size_t sym = drest % a;
        idx += sym * stride[dropped_pos[dd]];
        weight *= pd[sym];
        drest /= a;
      }
      acc += weight * f.table[idx];
    }
    table[ki] = acc;
  }

  CylinderObservable out = CylinderObservable::from_table(kept_window, std::move(table), a);

  // exact tables are carried along when available and small enough
  if (f.table_exact && f.table.size() <= (1u << 12)) {
    try {
      std::vector<Rat> exact(kept_size, Rat(0));
      for (std::size_t ki = 0; ki < kept_size; ++ki) {
        std::size_t base = 0, rest = ki;
        for (std::size_t kk = 0; kk < kept_pos.size(); ++kk) {
          base += (rest % a) * stride[kept_pos[kk]];
          rest /= a;
        }
        Rat acc = 0;
        for (std::size_t di = 0; di < dropped_size; ++di) {
          std::size_t idx = base, drest = di;
          Rat weight = 1;
          for (std::size_t dd = 0; dd < dropped_pos.size(); ++dd) {
            const std::size_t sym = drest % a;
            idx += sym * stride[dropped_pos[dd]];
            weight *= prob[sym];
            drest /= a;
          }
          acc += weight * (*f.table_exact)[idx];
        }
        exact[ki] = acc;
      }
      // keep the double table consistent with the exact one
      for (std::size_t ki = 0; ki < kept_size; ++ki) out.table[ki] = exact[ki].to_double();
      out.table_exact = std::move(exact);
      out.refresh_bound();
    } catch (const overflow_error&) {
      // exact path outgrew 128-bit rationals; the double table stands
    }
  }
  return out;
}

CylinderObservable condition_oracle(const CylinderObservable& f, const CoordSet& S,
                                    const std::vector<Rat>& prob) {
  const std::size_t a = f.alphabet;
  if (prob.size() != a) throw std::runtime_error("probability vector length must equal alphabet");
  pow_size(a, f.window.size(), 1u << 16, "oracle conditioning limited to 2^16 assignments");

  std::vector<std::size_t> kept_pos;
  for (std::size_t k = 0; k < f.window.size(); ++k)
    if (S.contains(f.window[k])) kept_pos.push_back(k);

  std::vector<std::size_t> stride(f.window.size());
  {
    std::size_t s = 1;
    for (std::size_t k = 0; k < f.window.size(); ++k) {
      stride[k] = s;
      s *= a;
    }
  }
  const std::size_t kept_size = pow_size(a, kept_pos.size(), 1u << 16, "oracle table too large");

  std::vector<GroupElement> kept_window;
  for (std::size_t k : kept_pos) kept_window.push_back(f.window[k]);

  const bool exact = f.table_exact.has_value();
  std::vector<Rat> num_exact(exact ? kept_size : 0, Rat(0)), den_exact(exact ? kept_size : 0, Rat(0));
  std::vector<double> num(kept_size, 0.0), den(kept_size, 0.0);
  std::vector<double> pd(a);
  for (std::size_t s = 0; s < a; ++s) pd[s] = prob[s].to_double();

  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    double weight = 1;
    Rat weight_exact = 1;
    std::size_t ki = 0, kstride = 1;
    for (std::size_t k = 0; k < f.window.size(); ++k) {
      const std::size_t sym = (idx / stride[k]) % a;
      weight *= pd[sym];
      if (exact) weight_exact *= prob[sym];
      if (std::find(kept_pos.begin(), kept_pos.end(), k) != kept_pos.end()) {
        ki += sym * kstride;
        kstride *= a;
      }
    }
    num[ki] += weight * f.table[idx];
    den[ki] += weight;
    if (exact) {
      num_exact[ki] += weight_exact * (*f.table_exact)[idx];
      den_exact[ki] += weight_exact;
    }
  }

  std::vector<double> table(kept_size, 0.0);
  for (std::size_t ki = 0; ki < kept_size; ++ki)
    table[ki] = den[ki] > 0 ? num[ki] / den[ki] : 0.0;
  CylinderObservable out = CylinderObservable::from_table(kept_window, std::move(table), a);
  if (exact) {
    std::vector<Rat> te(kept_size, Rat(0));
    for (std::size_t ki = 0; ki < kept_size; ++ki)
      if (!den_exact[ki].is_zero()) te[ki] = num_exact[ki] / den_exact[ki];
    for (std::size_t ki = 0; ki < kept_size; ++ki) out.table[ki] = te[ki].to_double();
    out.table_exact = std::move(te);
    out.refresh_bound();
  }
  return out;
}

std::vector<CylinderObservable> martingale_tail(const CylinderObservable& f, const PastWeights& w,
                                                const std::vector<GroupElement>& g_seq,
                                                const std::vector<Rat>& prob) {
  for (std::size_t i = 0; i + 1 < g_seq.size(); ++i)
    if (phi_compare(w, g_seq[i], g_seq[i + 1]) != OrderOutcome::Less)
      throw std::runtime_error("martingale tail sequence must be strictly <_Phi-increasing");
  std::vector<CylinderObservable> out;
  out.reserve(g_seq.size());
  for (const auto& g : g_seq) out.push_back(condition_cylinder(f, CoordSet::half_space(w, g), prob));
  return out;
}

// positions of each input window inside the union window
struct WindowMerge {
  std::vector<GroupElement> window;
  std::vector<std::size_t> pos_a, pos_b;
};

static WindowMerge merge_windows(const CylinderObservable& a, const CylinderObservable& b) {
  WindowMerge m;
  m.window = a.window;
  m.pos_a.resize(a.window.size());
  for (std::size_t i = 0; i < a.window.size(); ++i) m.pos_a[i] = i;
  m.pos_b.resize(b.window.size());
  for (std::size_t i = 0; i < b.window.size(); ++i) {
    auto it = std::find(m.window.begin(), m.window.end(), b.window[i]);
    if (it == m.window.end()) {
      m.window.push_back(b.window[i]);
      m.pos_b[i] = m.window.size() - 1;
    } else {
      m.pos_b[i] = std::size_t(it - m.window.begin());
    }
  }
  return m;
}

CylinderObservable cylinder_difference(const CylinderObservable& a, const CylinderObservable& b) {
  if (a.alphabet != b.alphabet) throw std::runtime_error("cylinder alphabet mismatch");
  const std::size_t al = a.alphabet;
  WindowMerge m = merge_windows(a, b);
  const std::size_t size = pow_size(al, m.window.size(), 1u << 24, "difference window too large");

  auto sub_index = [&](std::size_t idx, const std::vector<std::size_t>& pos) {
    std::size_t out = 0, stride = 1;
    for (std::size_t k = 0; k < pos.size(); ++k) {
      const std::size_t p = pos[k];
      std::size_t digit = idx;
      for (std::size_t q = 0; q < p; ++q) digit /= al;
      out += (digit % al) * stride;
      stride *= al;
    }
    return out;
  };

  std::vector<double> table(size);
  for (std::size_t idx = 0; idx < size; ++idx)
    table[idx] = a.table[sub_index(idx, m.pos_a)] - b.table[sub_index(idx, m.pos_b)];
  CylinderObservable out = CylinderObservable::from_table(m.window, std::move(table), al);
  if (a.table_exact && b.table_exact) {
    std::vector<Rat> exact(size, Rat(0));
    for (std::size_t idx = 0; idx < size; ++idx)
      exact[idx] = (*a.table_exact)[sub_index(idx, m.pos_a)] - (*b.table_exact)[sub_index(idx, m.pos_b)];
    for (std::size_t idx = 0; idx < size; ++idx) out.table[idx] = exact[idx].to_double();
    out.table_exact = std::move(exact);
    out.refresh_bound();
  }
  return out;
}

Rat l1_distance_exact(const CylinderObservable& a, const CylinderObservable& b,
                      const std::vector<Rat>& prob) {
  CylinderObservable diff = cylinder_difference(a, b);
  if (!diff.table_exact) throw std::runtime_error("l1 distance needs exact tables");
  for (auto& v : *diff.table_exact) v = rat_abs(v);
  return integral_cylinder_exact(diff, prob);
}

}  // namespace ergolab
