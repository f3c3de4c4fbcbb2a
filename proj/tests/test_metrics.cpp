#include <doctest.h>

#include "oracles.hpp"
#include "phasemm/metrics.hpp"
#include "phasemm/rng.hpp"

using namespace phasemm;

TEST_CASE("phase alignment on pure rotations") {
  const ComplexVector x_o = random_unit_signal(6, 1);
  CHECK(align_phase(x_o, x_o) == doctest::Approx(0.0));
  const ComplexVector rotated = x_o * Complex(0.0, 1.0);
  CHECK(align_phase(rotated, x_o) == doctest::Approx(M_PI / 2));
  CHECK(aligned_squared_error(rotated, x_o) < 1e-24);
  const ComplexVector r13 = x_o * std::polar(1.0, 1.3);
  CHECK(aligned_squared_error(r13, x_o) < 1e-12);
}

TEST_CASE("aligned error against the zero vector and itself") {
  const ComplexVector x_o = random_unit_signal(5, 3);
  CHECK(aligned_squared_error(ComplexVector::Zero(5), x_o) ==
        doctest::Approx(x_o.squaredNorm()));
  CHECK(aligned_squared_error(x_o, x_o) == 0.0);
}

TEST_CASE("orthogonal signals align with phi = 0 by convention") {
  ComplexVector a = ComplexVector::Zero(2), b = ComplexVector::Zero(2);
  a[0] = 1.0;
  b[1] = 1.0;
  CHECK(align_phase(a, b) == 0.0);
}

TEST_CASE("alignment never loses to a dense phase grid") {
  SplitMix64 g(7);
  for (int k = 0; k < 500; ++k) {
    const ComplexVector a = random_unit_signal(6, g.next());
    const ComplexVector b = random_unit_signal(6, g.next());
    const double h = aligned_squared_error(a, b);
    CHECK(h <= oracles::grid_aligned_error(a, b) + 1e-9);
  }
}

TEST_CASE("autocorrelation basics") {
  ComplexVector delta = ComplexVector::Zero(5);
  delta[0] = 1.0;
  Autocorrelation r = autocorrelation(delta);
  CHECK(r.values.size() == 9);
  CHECK(std::abs(r.at(0) - Complex(1, 0)) < 1e-15);
  for (int m = 1; m <= 4; ++m) {
    CHECK(std::abs(r.at(m)) < 1e-15);
    CHECK(std::abs(r.at(-m)) < 1e-15);
  }

  ComplexVector ones2 = ComplexVector::Ones(2);
  Autocorrelation r2 = autocorrelation(ones2);
  CHECK(std::abs(r2.at(-1) - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(r2.at(0) - Complex(2, 0)) < 1e-15);
  CHECK(std::abs(r2.at(1) - Complex(1, 0)) < 1e-15);
}

TEST_CASE("autocorrelation is conjugate symmetric with r0 = energy") {
  SplitMix64 g(11);
  for (int k = 0; k < 50; ++k) {
    const ComplexVector x = random_unit_signal(7, g.next()) * 2.3;
    Autocorrelation r = autocorrelation(x);
    CHECK(std::abs(r.at(0).imag()) < 1e-12);
    CHECK(std::abs(r.at(0).real() - x.squaredNorm()) < 1e-12);
    for (int m = 1; m < 7; ++m)
      CHECK(std::abs(r.at(-m) - std::conj(r.at(m))) < 1e-12);
  }
}

TEST_CASE("autocorrelation is invariant under a global phase") {
  SplitMix64 g(13);
  for (int k = 0; k < 100; ++k) {
    const ComplexVector x = random_unit_signal(6, g.next());
    const ComplexVector xr = x * std::polar(1.0, 2.0 * M_PI * g.next_unit());
    CHECK((autocorrelation(x).values - autocorrelation(xr).values).norm() <
          1e-10);
  }
}

TEST_CASE("autocorrelation is invariant under conjugate inversion") {
  SplitMix64 g(17);
  for (int k = 0; k < 100; ++k) {
    const ComplexVector x = random_unit_signal(6, g.next());
    ComplexVector flipped(6);
    for (int i = 0; i < 6; ++i) flipped[i] = std::conj(x[5 - i]);
    CHECK((autocorrelation(x).values - autocorrelation(flipped).values)
              .norm() < 1e-10);
  }
}

TEST_CASE("autocorrelation is invariant under in-support translation") {
  // Signals padded with trailing zeros can slide inside the window without
  // changing the autocorrelation.
  SplitMix64 g(19);
  for (int k = 0; k < 100; ++k) {
    ComplexVector x = ComplexVector::Zero(8);
    for (int i = 0; i < 5; ++i)
      x[i] = Complex(SplitMix64(g.next()).next_unit() - 0.5,
                     SplitMix64(g.next()).next_unit() - 0.5);
    ComplexVector shifted = ComplexVector::Zero(8);
    const int offset = 1 + static_cast<int>(g.next() % 3);
    for (int i = 0; i < 5; ++i) shifted[i + offset] = x[i];
    CHECK((autocorrelation(x).values - autocorrelation(shifted).values)
              .norm() < 1e-10);
  }
}

TEST_CASE("classification in the Gaussian setting") {
  const ComplexVector x_o = random_unit_signal(6, 23);
  RecoveryReport hit = classify(x_o, x_o, RecoverySetting::GaussianDirect);
  CHECK(hit.success);
  CHECK(hit.aligned_squared_error == 0.0);
  CHECK_FALSE(hit.autocorr_squared_error.has_value());

  RecoveryReport miss = classify(ComplexVector::Zero(6), x_o,
                                 RecoverySetting::GaussianDirect);
  CHECK_FALSE(miss.success);
}

TEST_CASE("classification in the DFT setting sees through trivial ambiguities") {
  const ComplexVector x_o = random_unit_signal(6, 29);

  RecoveryReport exact = classify(x_o, x_o, RecoverySetting::DFTAutocorr);
  CHECK(exact.success);
  CHECK(*exact.autocorr_success);
  CHECK(*exact.autocorr_squared_error == 0.0);

  // Conjugate inversion: huge aligned error, identical autocorrelation.
  ComplexVector flipped(6);
  for (int i = 0; i < 6; ++i) flipped[i] = std::conj(x_o[5 - i]);
  RecoveryReport r = classify(flipped, x_o, RecoverySetting::DFTAutocorr);
  CHECK(*r.autocorr_success);

  // In-support translation of a zero-padded signal.
  ComplexVector padded = ComplexVector::Zero(6);
  padded.head(4) = x_o.head(4);
  ComplexVector slid = ComplexVector::Zero(6);
  slid.segment(2, 4) = x_o.head(4);
  RecoveryReport t = classify(slid, padded, RecoverySetting::DFTAutocorr);
  CHECK(*t.autocorr_success);

  // Global phase.
  RecoveryReport p = classify(x_o * std::polar(1.0, 0.7), x_o,
                              RecoverySetting::DFTAutocorr);
  CHECK(*p.autocorr_success);
  CHECK(p.success);  // the aligned error also vanishes here
}
