#pragma once

#include <doctest.h>

// Purely relative comparison: doctest's Approx adds an absolute scale of 1
// by default, which is meaningless for small quantities.
inline doctest::Approx rel(double value, double eps) { return doctest::Approx(value).epsilon(eps).scale(0.0); }
