#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "germlab/recognition.hpp"
#include "germlab/unfolding.hpp"
#include "test_support.hpp"

using namespace germlab;
using testsupport::Lcg;

namespace {

constexpr int kOrder = 7;

JetR make_jet(std::initializer_list<std::tuple<int, int, Rational>> terms, int order = kOrder) {
  JetR f(order);
  for (const auto& [i, j, c] : terms) f.set(i, j, c);
  return f;
}

// The eight corank-1 normal forms, all with first component x.
MapGermR normal_form(ClassTag tag) {
  const JetR x = JetR::variable(0, kOrder);
  switch (tag) {
    case ClassTag::Fold:
      return {x, make_jet({{0, 2, 1}})};
    case ClassTag::Cusp:
      return {x, make_jet({{1, 1, 1}, {0, 3, 1}})};
    case ClassTag::Swallowtail:
      return {x, make_jet({{1, 1, 1}, {0, 4, 1}})};
    case ClassTag::Lips:
      return {x, make_jet({{0, 3, 1}, {2, 1, 1}})};
    case ClassTag::Beaks:
      return {x, make_jet({{0, 3, 1}, {2, 1, -1}})};
    case ClassTag::Butterfly:
      return {x, make_jet({{1, 1, 1}, {0, 5, 1}, {0, 7, 1}})};
    case ClassTag::Gulls:
      return {x, make_jet({{1, 2, 1}, {0, 4, 1}, {0, 5, 1}})};
    case ClassTag::Goose:
      return {x, make_jet({{0, 3, 1}, {3, 1, 1}})};
    default:
      throw std::logic_error("no normal form registered for this tag");
  }
}

// Conjugation by random polynomial diffeomorphisms of source and target:
// invertible rational linear part plus random quadratic and cubic terms.
MapGermR conjugate(const MapGermR& f, Lcg& rng) {
  auto diffeo = [&](JetR& d1, JetR& d2) {
    Rational a11, a12, a21, a22;
    do {
      a11 = rng.rational(3, 3);
      a12 = rng.rational(3, 3);
      a21 = rng.rational(3, 3);
      a22 = rng.rational(3, 3);
    } while (a11 * a22 - a12 * a21 == 0);
    d1 = JetR(kOrder);
    d2 = JetR(kOrder);
    d1.set(1, 0, a11);
    d1.set(0, 1, a12);
    d2.set(1, 0, a21);
    d2.set(0, 1, a22);
    for (int d = 2; d <= 3; ++d)
      for (int j = 0; j <= d; ++j) {
        d1.set(d - j, j, rng.rational(2, 3));
        d2.set(d - j, j, rng.rational(2, 3));
      }
  };
  JetR p1, p2, q1, q2;
  diffeo(p1, p2);
  diffeo(q1, q2);
  const JetR h1 = compose(f.f1(), p1, p2);
  const JetR h2 = compose(f.f2(), p1, p2);
  return MapGermR(compose(q1, h1, h2), compose(q2, h1, h2));
}

}  // namespace

TEST_CASE("class names are stable") {
  CHECK(std::string(class_name(ClassTag::Fold)) == "fold");
  CHECK(std::string(class_name(ClassTag::Gulls)) == "gulls");
  CHECK(std::string(class_name(ClassTag::OddSharksfin)) == "odd_sharksfin");
  CHECK(std::string(class_name(ClassTag::HyperbolicPairDegenerate)) ==
        "hyperbolic_pair_degenerate");
}

TEST_CASE("corank detection") {
  const JetR x = JetR::variable(0, kOrder);
  const JetR y = JetR::variable(1, kOrder);
  CHECK(corank(MapGermR(x + y * y, y)) == 0);
  CHECK(corank(normal_form(ClassTag::Fold)) == 1);
  CHECK(corank(MapGermR(make_jet({{0, 2, 1}}), x)) == 1);  // swapped components
  CHECK(corank(unfolding_germ<Rational>(UnfoldingId::I23,
                                        {Rational(0), Rational(0), Rational(0)})) == 2);
}

TEST_CASE("regular germs classify as regular") {
  const JetR x = JetR::variable(0, kOrder);
  const JetR y = JetR::variable(1, kOrder);
  auto res = classify(MapGermR(x + y * y * y, y - x * x));
  CHECK(res.cls.tag == ClassTag::Regular);
  CHECK(res.report.corank == 0);
}

TEST_CASE("fold criteria values") {
  auto res = classify_corank1(normal_form(ClassTag::Fold));
  CHECK(res.cls.tag == ClassTag::Fold);
  REQUIRE(res.report.eta_tower[0].has_value());
  CHECK(*res.report.eta_tower[0] == Rational(2));
}

TEST_CASE("cusp criteria values") {
  auto res = classify_corank1(normal_form(ClassTag::Cusp));
  CHECK(res.cls.tag == ClassTag::Cusp);
  CHECK(*res.report.eta_tower[0] == Rational(0));
  CHECK(*res.report.eta_tower[1] == Rational(6));
  // d lambda (0) = (1, 0) for this normal form
  CHECK(res.report.dlambda0[0] == Rational(1));
  CHECK(res.report.dlambda0[1] == Rational(0));
}

TEST_CASE("swallowtail criteria values") {
  auto res = classify_corank1(normal_form(ClassTag::Swallowtail));
  CHECK(res.cls.tag == ClassTag::Swallowtail);
  CHECK(*res.report.eta_tower[0] == Rational(0));
  CHECK(*res.report.eta_tower[1] == Rational(0));
  CHECK(*res.report.eta_tower[2] == Rational(24));
}

TEST_CASE("butterfly criteria values") {
  auto res = classify_corank1(normal_form(ClassTag::Butterfly));
  CHECK(res.cls.tag == ClassTag::Butterfly);
  CHECK(*res.report.eta_tower[0] == Rational(0));
  CHECK(*res.report.eta_tower[1] == Rational(0));
  CHECK(*res.report.eta_tower[2] == Rational(0));
  CHECK(*res.report.eta_tower[3] == Rational(120));
}

TEST_CASE("lips and beaks split on the Hessian determinant sign") {
  auto lips = classify_corank1(normal_form(ClassTag::Lips));
  CHECK(lips.cls.tag == ClassTag::Lips);
  REQUIRE(lips.report.hess_det.has_value());
  CHECK(*lips.report.hess_det == Rational(12));

  auto beaks = classify_corank1(normal_form(ClassTag::Beaks));
  CHECK(beaks.cls.tag == ClassTag::Beaks);
  CHECK(*beaks.report.hess_det == Rational(-12));
  CHECK(*beaks.report.eta_tower[1] == Rational(6));
}

TEST_CASE("gulls criteria values") {
  auto res = classify_corank1(normal_form(ClassTag::Gulls));
  CHECK(res.cls.tag == ClassTag::Gulls);
  CHECK(*res.report.hess_det == Rational(-4));
  CHECK(*res.report.eta_tower[1] == Rational(0));
  CHECK(*res.report.eta_tower[2] == Rational(24));
}

TEST_CASE("goose criteria values") {
  auto res = classify_corank1(normal_form(ClassTag::Goose));
  CHECK(res.cls.tag == ClassTag::Goose);
  CHECK(*res.report.hess_det == Rational(0));
  REQUIRE(res.report.hess_rank.has_value());
  CHECK(*res.report.hess_rank == 1);
  CHECK(*res.report.eta_tower[1] == Rational(6));
  REQUIRE(res.report.theta3_lambda0.has_value());
  CHECK(*res.report.theta3_lambda0 == Rational(6));
}

TEST_CASE("rank-0 Hessian germ is reported unresolved with a reason") {
  const MapGermR f(JetR::variable(0, kOrder), make_jet({{0, 4, 1}}));
  auto res = classify_corank1(f);
  CHECK(res.cls.tag == ClassTag::Unresolved);
  CHECK(!res.cls.reason.empty());
}

TEST_CASE("verdicts are invariant under jet-diffeomorphism conjugation") {
  const ClassTag tags[] = {ClassTag::Fold,  ClassTag::Cusp,      ClassTag::Swallowtail,
                           ClassTag::Lips,  ClassTag::Beaks,     ClassTag::Butterfly,
                           ClassTag::Gulls, ClassTag::Goose};
  Lcg rng(2024);
  int unresolved = 0, total = 0;
  for (ClassTag expected : tags) {
    const MapGermR f = normal_form(expected);
    for (int trial = 0; trial < 12; ++trial) {
      const MapGermR g = conjugate(f, rng);
      const auto res = classify(g);
      ++total;
      if (res.cls.tag == ClassTag::Unresolved) {
        ++unresolved;  // truncation may exhaust the jet order, never misclassify
        continue;
      }
      INFO("normal form ", class_name(expected), ", trial ", trial, " gave ",
           class_name(res.cls.tag));
      CHECK(res.cls.tag == expected);
    }
  }
  // the order-7 jets keep almost every conjugate decidable
  CHECK(unresolved * 3 <= total);
}

TEST_CASE("kernel field convention for corank-2 unfoldings") {
  const auto f = unfolding_germ<Rational>(UnfoldingId::I23,
                                          {Rational(0), Rational(0), Rational(0)});
  CHECK_THROWS_AS(kernel_field(f), std::domain_error);
  const auto eta = kernel_field(f, Corank2Kernel::unfolding_xy);
  CHECK(eta[0] == -JetR::variable(0, eta[0].order()));
  CHECK(eta[1] == JetR::variable(1, eta[1].order()));
}

TEST_CASE("pencil classification of the unfolding origins") {
  auto at_origin = [](UnfoldingId u, std::vector<Rational> params) {
    return classify(unfolding_germ<Rational>(u, params)).cls.tag;
  };
  const Rational z(0), one(1);

  // i23 family: the discriminant of the pencil form is 16c
  CHECK(at_origin(UnfoldingId::I23, {z, z, z}) == ClassTag::I23Candidate);
  CHECK(at_origin(UnfoldingId::I23, {z, z, one}) == ClassTag::Sharksfin);
  CHECK(at_origin(UnfoldingId::I23, {z, z, -one}) == ClassTag::DeltoidTwoJet);

  // sharksfin origin: restricted valuations (3, 3)
  CHECK(at_origin(UnfoldingId::Sharksfin, {z, z}) == ClassTag::Sharksfin);

  // odd-sharksfin origin: (3, 5) at c = 0, (3, 3) once the y^3 term enters
  CHECK(at_origin(UnfoldingId::OddSharksfin, {z, z, z}) == ClassTag::OddSharksfin);
  CHECK(at_origin(UnfoldingId::OddSharksfin, {z, z, one}) == ClassTag::Sharksfin);
  CHECK(at_origin(UnfoldingId::OddSharksfin, {z, z, -one}) == ClassTag::Sharksfin);
}

TEST_CASE("hyperbolic pencil with degenerate member valuation") {
  // (x^2 + y^4, y^2 + x^3): y^4 equals the square of the other member's
  // kernel-line restriction, so the first member carries no order-3 or
  // order-5 data and the pair is degenerate
  const MapGermR f(make_jet({{2, 0, 1}, {0, 4, 1}}), make_jet({{0, 2, 1}, {3, 0, 1}}));
  CHECK(classify(f).cls.tag == ClassTag::HyperbolicPairDegenerate);
}

TEST_CASE("pencil discriminant vanishing identically is unresolved") {
  const MapGermR f(make_jet({{2, 0, 1}}), make_jet({{2, 0, 1}, {0, 3, 1}}));
  const auto res = classify(f);
  CHECK(res.cls.tag == ClassTag::Unresolved);
  CHECK(!res.cls.reason.empty());
}

TEST_CASE("irrational pencil discriminant falls back to the floating path") {
  // disc = 32, not a rational square
  const MapGermR f(make_jet({{2, 0, 1}, {1, 1, 4}, {0, 2, 2}, {0, 3, 1}}),
                   make_jet({{1, 1, 1}, {3, 0, 1}}));
  const auto res = classify(f);
  CHECK(res.cls.tag == ClassTag::Sharksfin);
}

TEST_CASE("pencil verdicts survive conjugation") {
  Lcg rng(77);
  struct Case {
    UnfoldingId u;
    std::vector<Rational> params;
    ClassTag expected;
  };
  const Case cases[] = {
      {UnfoldingId::I23, {Rational(0), Rational(0), Rational(0)}, ClassTag::I23Candidate},
      {UnfoldingId::I23, {Rational(0), Rational(0), Rational(1)}, ClassTag::Sharksfin},
      {UnfoldingId::I23, {Rational(0), Rational(0), Rational(-1)}, ClassTag::DeltoidTwoJet},
      {UnfoldingId::Sharksfin, {Rational(0), Rational(0)}, ClassTag::Sharksfin},
      {UnfoldingId::OddSharksfin,
       {Rational(0), Rational(0), Rational(0)},
       ClassTag::OddSharksfin},
  };
  for (const Case& tc : cases) {
    const MapGermR f = unfolding_germ<Rational>(tc.u, tc.params);
    for (int trial = 0; trial < 6; ++trial) {
      const MapGermR g = conjugate(f, rng);
      INFO(std::string(unfolding_name(tc.u)), " conjugation trial ", trial);
      CHECK(classify(g).cls.tag == tc.expected);
    }
  }
}
