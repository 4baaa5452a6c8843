// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <tuple>

#include "bqc/photonics.h"

namespace bqc::photonics {

namespace {

// Conditional state of the remaining subsystems given that the detector-side
// register holds Fock state `occupation`. Unnormalized.
struct OutputBlock {
  std::vector<int> occupation;
  QuantumState state;
  double p = 0;
};

struct Blocks {
  SubsystemLayout rest;
  std::vector<OutputBlock> blocks;
};

Blocks output_blocks(const QuantumState& s, const std::string& reg, const TdiNetwork& net) {
  const Subsystem& e = s.layout().entry(reg);
  if (e.kind != SubsystemKind::kRail || e.modes.size() != net.rails) {
    throw LayoutError("register does not match the interferometer");
  }
  FockBasis out(net.outputs.size(), e.fock->cap(), e.fock->cap());
  SparseMatrix w = fock_transfer(*e.fock, out, net.modes);
  SparseMatrix rows = w.transpose();  // column o lists the inputs feeding output o

  std::vector<std::string> order;
  Blocks b;
  for (const auto& entry : s.layout().entries()) {
    if (entry.label == reg) continue;
    order.push_back(entry.label);
    b.rest.add(entry);
  }
  order.push_back(reg);
  QuantumState moved = reorder(s, order);
  const auto r = static_cast<Eigen::Index>(e.dim);
  const auto q = static_cast<Eigen::Index>(b.rest.dim());

  for (std::size_t o = 0; o < out.size(); ++o) {
    std::vector<std::pair<Eigen::Index, cplx>> feed;
    for (SparseMatrix::InnerIterator it(rows, static_cast<Eigen::Index>(o)); it; ++it) {
      feed.emplace_back(it.row(), it.value());
    }
    if (feed.empty()) continue;
    OutputBlock blk;
    blk.occupation = out.occupation(o);
    if (moved.is_pure()) {
      const Vector& psi = moved.vector();
      Vector v = Vector::Zero(q);
      for (const auto& [in, amp] : feed) {
        for (Eigen::Index k = 0; k < q; ++k) v(k) += amp * psi(k * r + in);
      }
      blk.p = v.squaredNorm();
      blk.state = QuantumState::from_vector(b.rest, std::move(v));
    } else {
      const Matrix& rho = moved.density_ref();
      Matrix m = Matrix::Zero(q, q);
      for (const auto& [i1, a1] : feed) {
        for (const auto& [i2, a2] : feed) {
          cplx c = a1 * std::conj(a2);
          for (Eigen::Index k = 0; k < q; ++k) {
            for (Eigen::Index l = 0; l < q; ++l) m(k, l) += c * rho(k * r + i1, l * r + i2);
          }
        }
      }
      m = 0.5 * (m + m.adjoint()).eval();
      blk.p = std::max(0.0, m.trace().real());
      blk.state = QuantumState::from_density(b.rest, std::move(m));
    }
    if (blk.p > 1e-300) b.blocks.push_back(std::move(blk));
  }
  return b;
}

// Threshold response: probability that exactly mode m clicks, or that none do.
double single_click(const std::vector<int>& occ, std::size_t m, double eta) {
  int total = 0;
  for (int n : occ) total += n;
  return (1 - std::pow(1 - eta, occ[m])) * std::pow(1 - eta, total - occ[m]);
}

double no_click(const std::vector<int>& occ, double eta) {
  int total = 0;
  for (int n : occ) total += n;
  return std::pow(1 - eta, total);
}

ClickRecord make_click(const TdiNetwork& net, std::size_t mode) {
  ClickRecord c;
  const TdiOutput& o = net.outputs[mode];
  c.detector = o.detector;
  c.window = o.window;
  int d = net.settings.delay;
  int start = net.pair_start(o.window);
  c.interfered = start >= 0;
  if (c.interfered) {
    c.bin_a = start;
    c.bin_b = start + d;
  } else {
    int early = o.window - d;
    c.bin_a = early >= 0 ? early : -1;
    c.bin_b = o.window < static_cast<int>(net.rails) ? o.window : -1;
  }
  c.phase_applied = net.settings.lock_phase;
  return c;
}

struct Outcome {
  DetectionKind kind;
  std::size_t mode = 0;  // clicked output for single clicks
  double p = 0;
};

std::vector<Outcome> outcomes_for(const OutputBlock& blk, const TdiNetwork& net, double eta,
                                  const ClickFilter& accept) {
  std::vector<Outcome> v;
  double nc = no_click(blk.occupation, eta);
  double single = 0;
  v.push_back({DetectionKind::kNoClick, 0, blk.p * nc});
  for (std::size_t m = 0; m < blk.occupation.size(); ++m) {
    if (blk.occupation[m] == 0) continue;
    double pm = single_click(blk.occupation, m, eta);
    single += pm;
    bool herald = net.heralding(net.outputs[m].window) && (!accept || accept(make_click(net, m)));
    v.push_back({herald ? DetectionKind::kHerald : DetectionKind::kRejectedWindow, m, blk.p * pm});
  }
  v.push_back({DetectionKind::kMultiClick, 0, blk.p * std::max(0.0, 1 - nc - single)});
  return v;
}

}  // namespace

DetectionSummary resolve_detection(const QuantumState& s, const std::string& reg,
                                   const TdiNetwork& net, const DetectorModel& model,
                                   const ClickFilter& accept) {
  Blocks b = output_blocks(s, reg, net);
  DetectionSummary out;
  std::vector<int> slot(net.outputs.size(), -1);
  for (const auto& blk : b.blocks) {
    for (const auto& oc : outcomes_for(blk, net, model.efficiency, accept)) {
      if (oc.p <= 0) continue;
      switch (oc.kind) {
        case DetectionKind::kNoClick:
          out.p_no_click += oc.p;
          break;
        case DetectionKind::kMultiClick:
          out.p_multi_click += oc.p;
          break;
        case DetectionKind::kRejectedWindow:
          out.p_rejected_window += oc.p;
          break;
        case DetectionKind::kHerald: {
          out.p_herald += oc.p;
          QuantumState part = blk.state.as_density().scaled(oc.p / blk.p);
          int& k = slot[oc.mode];
          if (k < 0) {
            k = static_cast<int>(out.heralds.size());
            out.heralds.push_back({make_click(net, oc.mode), part});
          } else {
            HeraldBranch& h = out.heralds[static_cast<std::size_t>(k)];
            h.state = QuantumState::from_density(b.rest, h.state.density_ref() + part.density_ref());
          }
          break;
        }
      }
    }
  }
  // Keep a stable order: by window, then detector.
  std::sort(out.heralds.begin(), out.heralds.end(), [](const HeraldBranch& x, const HeraldBranch& y) {
    return std::tie(x.click.window, x.click.detector) < std::tie(y.click.window, y.click.detector);
  });
  return out;
}

namespace {

SampledDetection sample(const QuantumState& s, const std::string& reg, const TdiNetwork& net,
                        const DetectorModel& model, Rng& rng, bool heralds_only,
                        const ClickFilter& accept) {
  Blocks b = output_blocks(s, reg, net);
  std::vector<std::pair<const OutputBlock*, Outcome>> all;
  double total = 0, p_herald = 0;
  for (const auto& blk : b.blocks) {
    for (const auto& oc : outcomes_for(blk, net, model.efficiency, accept)) {
      if (oc.p <= 0) continue;
      if (oc.kind == DetectionKind::kHerald) p_herald += oc.p;
      if (heralds_only && oc.kind != DetectionKind::kHerald) continue;
      total += oc.p;
      all.emplace_back(&blk, oc);
    }
  }
  SampledDetection sd;
  // conditional on the input, which may carry an earlier weight
  double w = s.trace_weight();
  sd.herald_probability = w > 0 ? p_herald / w : 0;
  if (all.empty() || total <= 0) {
    sd.kind = DetectionKind::kNoClick;
    sd.state = QuantumState::from_density(b.rest, Matrix::Zero(static_cast<Eigen::Index>(b.rest.dim()),
                                                               static_cast<Eigen::Index>(b.rest.dim())));
    return sd;
  }
  double u = rng.uniform() * total;
  std::size_t pick = all.size() - 1;
  for (std::size_t i = 0; i < all.size(); ++i) {
    u -= all[i].second.p;
    if (u < 0) {
      pick = i;
      break;
    }
  }
  const auto& [blk, oc] = all[pick];
  sd.kind = oc.kind;
  if (oc.kind == DetectionKind::kHerald || oc.kind == DetectionKind::kRejectedWindow) {
    sd.click = make_click(net, oc.mode);
  }
  sd.state = blk->state.normalized();
  return sd;
}

}  // namespace

SampledDetection detect(const QuantumState& s, const std::string& reg, const TdiNetwork& net,
                        const DetectorModel& model, Rng& rng, const ClickFilter& accept) {
  return sample(s, reg, net, model, rng, false, accept);
}

SampledDetection sample_heralded(const QuantumState& s, const std::string& reg, const TdiNetwork& net,
                                 const DetectorModel& model, Rng& rng, const ClickFilter& accept) {
  return sample(s, reg, net, model, rng, true, accept);
}

}  // namespace bqc::photonics
