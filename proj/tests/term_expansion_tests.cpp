#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include <doctest.h>

#include "qls/errors.hpp"
#include "qls/phase_matching.hpp"
#include "qls/pulses.hpp"
#include "qls/term_expansion.hpp"

using namespace qls;

namespace {

TermDescriptor make_term(OuterField outer, std::vector<Interaction> left,
                         std::vector<Interaction> right) {
  TermDescriptor t;
  t.outer_field = outer;
  t.left_chain = std::move(left);
  t.right_chain = std::move(right);
  int heads = 0;
  if (outer == OuterField::None) heads = 2;
  else if (outer != OuterField::Both) heads = 1;
  int probes = 0;
  for (const auto* chain : {&t.left_chain, &t.right_chain}) {
    for (const Interaction& i : *chain) {
      if (i.is_probe()) ++probes;
    }
  }
  t.lpr_order = heads + probes;
  return t;
}

// Closed-form term count, derived separately from the enumerator: with
// A = 2 n_classical slot choices per classical interaction and sequences up
// to length L,
//   1 (transmission) + 2 sum_l A^l (one-point) + sum_s (s+1) A^s (two
//   polarizations) + 4 sum_l (l+1) A^l (probe inside a polarization).
std::size_t expected_term_count(int n_classical, int max_len) {
  const double a = 2.0 * n_classical;
  double geo = 0.0;
  double weighted = 0.0;
  double power = 1.0;  // A^0, also when A = 0
  for (int l = 0; l <= max_len; ++l) {
    geo += power;
    weighted += (l + 1) * power;
    power *= a;
  }
  return static_cast<std::size_t>(1.0 + 2.0 * geo + 5.0 * weighted);
}

BeamGeometry tilted_geometry() {
  return {WaveVector{1.0, 0.0, 0.0},
          {WaveVector{0.92387953251128674, 0.38268343236508977, 0.0},
           WaveVector{0.7, 0.6, 0.39}}};
}

std::set<TermClass> class_set(const std::vector<std::pair<TermDescriptor, TermClass>>& terms) {
  std::set<TermClass> out;
  for (const auto& [term, cls] : terms) out.insert(cls);
  return out;
}

}  // namespace

TEST_CASE("enumeration size matches the closed-form count") {
  for (int n = 0; n <= 2; ++n) {
    for (int max_len = 0; max_len <= 4; ++max_len) {
      CHECK(enumerate_terms(n, max_len).size() == expected_term_count(n, max_len));
    }
  }
  CHECK(expected_term_count(0, 0) == 8);
  CHECK(expected_term_count(1, 2) == 100);
}

TEST_CASE("enumeration is canonical and duplicate-free") {
  const auto terms = enumerate_terms(2, 3);
  CHECK(std::is_sorted(terms.begin(), terms.end(), term_less));
  CHECK(std::adjacent_find(terms.begin(), terms.end()) == terms.end());
}

TEST_CASE("smallest expansion contains exactly the field-only skeleton") {
  const auto terms = enumerate_terms(0, 0);
  REQUIRE(terms.size() == 8);
  std::map<TermClass, int> histogram;
  for (const auto& t : terms) ++histogram[classify(t)];
  CHECK(histogram[TermClass::Zeroth] == 1);
  CHECK(histogram[TermClass::FirstOrder] == 2);
  CHECK(histogram[TermClass::SecondOrderType1] == 1);
  CHECK(histogram[TermClass::SecondOrderType2Absorption] == 2);
  CHECK(histogram[TermClass::SecondOrderType2Anomalous] == 2);
}

TEST_CASE("enumeration guards its combinatorial limits") {
  CHECK_THROWS_AS(enumerate_terms(5, 2), CombinatorialLimitExceeded);
  CHECK_THROWS_AS(enumerate_terms(1, 7), CombinatorialLimitExceeded);
  CHECK_THROWS_AS(enumerate_terms(-1, 2), ValidationError);
  CHECK_THROWS_AS(enumerate_terms(1, -2), ValidationError);
}

TEST_CASE("classification of handwritten terms") {
  const auto zeroth = make_term(OuterField::Both, {}, {});
  CHECK(classify(zeroth) == TermClass::Zeroth);

  const auto first = make_term(OuterField::ADag, {}, {Interaction{1, true}});
  CHECK(classify(first) == TermClass::FirstOrder);

  const auto type1 = make_term(OuterField::None, {Interaction{1, true}}, {});
  CHECK(classify(type1) == TermClass::SecondOrderType1);

  // bare a^dag head against a polarization that absorbs the probe photon
  const auto absorption = make_term(
      OuterField::ADag, {},
      {Interaction{1, true}, Interaction{kProbeField, true}, Interaction{1, false}});
  CHECK(classify(absorption) == TermClass::SecondOrderType2Absorption);

  // the mirrored orientation: bare a head, probe emitted from the left chain
  const auto mirrored = make_term(OuterField::A, {Interaction{kProbeField, false}}, {});
  CHECK(classify(mirrored) == TermClass::SecondOrderType2Absorption);

  const auto anomalous = make_term(OuterField::ADag, {}, {Interaction{kProbeField, false}});
  CHECK(classify(anomalous) == TermClass::SecondOrderType2Anomalous);
}

TEST_CASE("malformed descriptors are rejected") {
  TermDescriptor bare_with_chain;
  bare_with_chain.outer_field = OuterField::Both;
  bare_with_chain.right_chain = {Interaction{1, true}};
  CHECK_THROWS_AS(classify(bare_with_chain), ValidationError);

  auto wrong_order = make_term(OuterField::ADag, {}, {Interaction{1, true}});
  wrong_order.lpr_order = 2;
  CHECK_THROWS_AS(classify(wrong_order), ValidationError);

  auto negative_field = make_term(OuterField::ADag, {}, {Interaction{-2, true}});
  CHECK_THROWS_AS(classify(negative_field), ValidationError);
}

TEST_CASE("signal wavevector sums signed contributions with the conjugate flip") {
  // exact binary fractions so the vector sums are exact
  const BeamGeometry g{WaveVector{1.0, 0.0, 0.0},
                       {WaveVector{0.5, 0.25, 0.0}, WaveVector{0.125, -0.5, 0.25}}};

  const auto zeroth = make_term(OuterField::Both, {}, {});
  CHECK((signal_wavevector(zeroth, g) == WaveVector{0.0, 0.0, 0.0}));

  // +k1 radiated from the right chain
  const auto first = make_term(OuterField::ADag, {}, {Interaction{1, true}});
  CHECK((signal_wavevector(first, g) == g.k_classical[0]));

  // the same interaction on the conjugate side flips sign
  const auto conj_side = make_term(OuterField::A, {Interaction{1, true}}, {});
  CHECK((signal_wavevector(conj_side, g) == -g.k_classical[0]));

  // balanced classical pair around a probe absorption nets +k_probe
  const auto absorption = make_term(
      OuterField::ADag, {},
      {Interaction{1, true}, Interaction{kProbeField, true}, Interaction{1, false}});
  CHECK((signal_wavevector(absorption, g) == g.k_probe));

  // anomalous terms radiate against the probe
  const auto anomalous = make_term(OuterField::ADag, {}, {Interaction{kProbeField, false}});
  CHECK((signal_wavevector(anomalous, g) == -g.k_probe));

  // mixing both beams
  const auto mixed = make_term(OuterField::None, {Interaction{2, true}}, {Interaction{1, true}});
  CHECK((signal_wavevector(mixed, g) == g.k_classical[0] - g.k_classical[1]));

  const auto out_of_range = make_term(OuterField::ADag, {}, {Interaction{3, true}});
  CHECK_THROWS_AS(signal_wavevector(out_of_range, g), IndexOutOfRange);
}

TEST_CASE("cancelling contributions yield the exact zero wavevector") {
  // these components make a pairwise sum of +k1 +k2 -k1 -k2 leave ~1e-16 of
  // dust along x while y and z cancel exactly, which used to fake a phase
  // match along the probe
  const BeamGeometry g{WaveVector{1.0, 0.0, 0.0},
                       {WaveVector{0.8, 0.5, 0.33}, WaveVector{0.6, -0.7, 0.2}}};
  REQUIRE(is_geometry_valid(g, 6).valid);

  const auto balanced =
      make_term(OuterField::ADag, {},
                {Interaction{1, true}, Interaction{2, true}, Interaction{1, false},
                 Interaction{2, false}});
  CHECK(classify(balanced) == TermClass::FirstOrder);
  CHECK((signal_wavevector(balanced, g) == WaveVector{0.0, 0.0, 0.0}));
  CHECK_FALSE(survives_in_probe_direction(balanced, g));

  // with the cancellation exact, survivor sets stay statistics-independent
  for (int max_len : {2, 4}) {
    CHECK(surviving_terms(2, max_len, g, ProbeKind::Fock1) ==
          surviving_terms(2, max_len, g, ProbeKind::CoherentM));
  }
}

TEST_CASE("phase-matching survival per class") {
  const BeamGeometry tilted = tilted_geometry();
  const BeamGeometry collinear{WaveVector{1.0, 0.0, 0.0}, {WaveVector{1.0, 0.0, 0.0}}};

  const auto zeroth = make_term(OuterField::Both, {}, {});
  const auto type1 = make_term(OuterField::None, {Interaction{1, true}}, {});
  CHECK(survives_in_probe_direction(zeroth, tilted));
  CHECK(survives_in_probe_direction(type1, tilted));
  CHECK(survives_in_probe_direction(zeroth, collinear));
  CHECK(survives_in_probe_direction(type1, collinear));

  const auto absorption = make_term(
      OuterField::ADag, {},
      {Interaction{1, true}, Interaction{kProbeField, true}, Interaction{1, false}});
  CHECK(survives_in_probe_direction(absorption, tilted));

  const auto anomalous = make_term(OuterField::ADag, {}, {Interaction{kProbeField, false}});
  CHECK_FALSE(survives_in_probe_direction(anomalous, tilted));
  CHECK_FALSE(survives_in_probe_direction(anomalous, collinear));

  // a lone classical emission only lines up when the pump is collinear
  const auto first = make_term(OuterField::ADag, {}, {Interaction{1, true}});
  CHECK_FALSE(survives_in_probe_direction(first, tilted));
  CHECK(survives_in_probe_direction(first, collinear));
}

TEST_CASE("field signature fixes the photon-number scaling per class") {
  const double m = 1e6;
  const auto zeroth = make_term(OuterField::Both, {}, {});
  const auto first = make_term(OuterField::ADag, {}, {Interaction{1, true}});
  const auto type1 = make_term(OuterField::None, {}, {});
  const auto absorption =
      make_term(OuterField::ADag, {}, {Interaction{kProbeField, true}});
  const auto anomalous =
      make_term(OuterField::ADag, {}, {Interaction{kProbeField, false}});

  for (ProbeKind k : {ProbeKind::Fock1, ProbeKind::HeraldedBiphoton}) {
    CHECK_FALSE(field_signature(zeroth, k, m).vanishes);
    CHECK(field_signature(first, k, m).vanishes);
    CHECK_FALSE(field_signature(type1, k, m).vanishes);
    CHECK_FALSE(field_signature(absorption, k, m).vanishes);
    CHECK(field_signature(anomalous, k, m).vanishes);
    // single-photon statistics never amplify
    CHECK(field_signature(zeroth, k, m).m_factor == 1.0);
    CHECK(field_signature(absorption, k, m).m_factor == 1.0);
  }

  const ProbeKind c = ProbeKind::CoherentM;
  CHECK_FALSE(field_signature(zeroth, c, m).vanishes);
  CHECK_FALSE(field_signature(first, c, m).vanishes);
  CHECK_FALSE(field_signature(type1, c, m).vanishes);
  CHECK_FALSE(field_signature(absorption, c, m).vanishes);
  CHECK_FALSE(field_signature(anomalous, c, m).vanishes);

  CHECK(field_signature(zeroth, c, m).m_exponent == 1.0);
  CHECK(field_signature(first, c, m).m_exponent == 0.5);
  CHECK(field_signature(type1, c, m).m_exponent == 0.0);
  CHECK(field_signature(absorption, c, m).m_exponent == 1.0);
  CHECK(field_signature(anomalous, c, m).m_exponent == 1.0);

  // linear factors are exact, not pow() approximations
  CHECK(field_signature(zeroth, c, m).m_factor == m);
  CHECK(field_signature(absorption, c, m).m_factor == m);
  CHECK(field_signature(anomalous, c, m).m_factor == m);
  CHECK(field_signature(first, c, m).m_factor == 1000.0);
  CHECK(field_signature(type1, c, m).m_factor == 1.0);

  // the state-based overload reads m off the state
  SpectralProfile flat;
  flat.grid = FrequencyGrid(100.0, 200.0, 2);
  flat.amplitude = {cplx(1.0, 0.0), cplx(1.0, 0.0)};
  const ProbeState state = CoherentM(flat, 250.0);
  CHECK(field_signature(zeroth, state).m_factor == 250.0);
}

TEST_CASE("terms factor onto the expected probe correlators") {
  const auto zeroth = make_term(OuterField::Both, {}, {});
  CHECK(probe_correlator(zeroth) == CorrelatorKind::Normal);

  const auto first_dag = make_term(OuterField::ADag, {}, {Interaction{1, true}});
  CHECK(probe_correlator(first_dag) == CorrelatorKind::OnePointADag);
  const auto first_a = make_term(OuterField::A, {Interaction{1, true}}, {});
  CHECK(probe_correlator(first_a) == CorrelatorKind::OnePointA);

  const auto type1 = make_term(OuterField::None, {}, {});
  CHECK_FALSE(probe_correlator(type1).has_value());

  const auto absorption = make_term(OuterField::ADag, {}, {Interaction{kProbeField, true}});
  CHECK(probe_correlator(absorption) == CorrelatorKind::Normal);

  const auto anom_dag = make_term(OuterField::ADag, {}, {Interaction{kProbeField, false}});
  CHECK(probe_correlator(anom_dag) == CorrelatorKind::AnomalousADagADag);
  const auto anom_a = make_term(OuterField::A, {Interaction{kProbeField, true}}, {});
  CHECK(probe_correlator(anom_a) == CorrelatorKind::AnomalousAA);
}

TEST_CASE("surviving terms coincide for single-photon and coherent probes") {
  const BeamGeometry g = tilted_geometry();
  for (int n = 0; n <= 2; ++n) {
    for (int max_len : {2, 4}) {
      const auto fock = surviving_terms(n, max_len, g, ProbeKind::Fock1);
      const auto coherent = surviving_terms(n, max_len, g, ProbeKind::CoherentM);
      const auto heralded = surviving_terms(n, max_len, g, ProbeKind::HeraldedBiphoton);
      CHECK(fock == coherent);
      CHECK(fock == heralded);
      const std::set<TermClass> classes = class_set(fock);
      const std::set<TermClass> allowed{TermClass::Zeroth, TermClass::SecondOrderType1,
                                        TermClass::SecondOrderType2Absorption};
      CHECK(std::includes(allowed.begin(), allowed.end(), classes.begin(), classes.end()));
      CHECK(classes == allowed);  // all three backbone classes are present
    }
  }
}

TEST_CASE("the backbone survives with no classical beams at all") {
  const BeamGeometry g{WaveVector{1.0, 0.0, 0.0}, {}};
  const auto fock = surviving_terms(0, 2, g, ProbeKind::Fock1);
  const std::set<TermClass> expected{TermClass::Zeroth, TermClass::SecondOrderType1,
                                     TermClass::SecondOrderType2Absorption};
  CHECK(class_set(fock) == expected);
}

TEST_CASE("collinear pumping breaks the equivalence of probe statistics") {
  const BeamGeometry collinear{WaveVector{1.0, 0.0, 0.0}, {WaveVector{1.0, 0.0, 0.0}}};
  const auto fock = surviving_terms(1, 2, collinear, ProbeKind::Fock1);
  const auto coherent = surviving_terms(1, 2, collinear, ProbeKind::CoherentM);
  CHECK(fock != coherent);
  CHECK(coherent.size() > fock.size());
  const std::set<TermClass> fock_classes = class_set(fock);
  const std::set<TermClass> coherent_classes = class_set(coherent);
  CHECK(coherent_classes.count(TermClass::FirstOrder) == 1);
  CHECK(fock_classes.count(TermClass::FirstOrder) == 0);
  CHECK(coherent_classes.count(TermClass::SecondOrderType2Anomalous) == 1);
}

TEST_CASE("interaction scales justify the truncation bookkeeping") {
  const ScaleEstimate even = interaction_scale(1.0, 100.0, 100.0, 1.0);
  CHECK(even.ratio() == doctest::Approx(1.0).epsilon(1e-14));

  // strong classical pulses tower over a single spontaneous emission
  const ScaleEstimate strong = interaction_scale(0.25, 1e6, 1.0, 1e6);
  CHECK(strong.ratio() == doctest::Approx(2e6).epsilon(1e-12));

  CHECK_THROWS_AS(interaction_scale(0.0, 100.0, 100.0, 1.0), ValidationError);
  CHECK_THROWS_AS(interaction_scale(1.5, 100.0, 100.0, 1.0), ValidationError);
  CHECK_THROWS_AS(interaction_scale(0.5, 0.0, 100.0, 1.0), ValidationError);
  CHECK_THROWS_AS(interaction_scale(0.5, 100.0, -1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(interaction_scale(0.5, 100.0, 100.0, 0.0), ValidationError);
}
