#pragma once

namespace mfs {

// Central tolerance ledger. Every verdict in the library reads its
// thresholds from here; the CLI lets a run override any entry and echoes
// the resolved values into its output.
struct Tolerances {
  // Norm oracle checks.
  double homogeneity = 1e-10;
  double euler = 1e-10;
  double grad_fd = 1e-6;
  double hess_fd = 1e-4;

  // Boolean linear-equivalence threshold at n = 512.
  double equivalence = 1e-4;

  // Singular-value ratio below which a tangent vector tau is feasible.
  double tau = 1e-8;

  // Relative threshold for second fundamental form classification.
  double sff_scale = 1e-7;

  // Metric derivative oracles against central differences (mixed relative).
  double metric_fd = 1e-5;
};

}  // namespace mfs
