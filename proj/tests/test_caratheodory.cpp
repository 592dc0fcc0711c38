#include <gtest/gtest.h>

#include "qapprox/caratheodory.hpp"
#include "qapprox/fixtures.hpp"
#include "test_support.hpp"

using namespace qapprox;

TEST(Reduce, AlreadyMinimalIsUnchanged) {
  const StateSet s({BlochVector(0, 0, 1), BlochVector(0, 0, -1)});
  const Decomposition d(s, MixtureWeights(Eigen::Vector2d(0.6, 0.4)));
  const auto t = reduce_traced(d);
  EXPECT_TRUE(t.steps.empty());
  EXPECT_EQ(t.result.weights().vec(), d.weights().vec());
}

TEST(Reduce, CollinearTripleDropsCentre) {
  const StateSet s({BlochVector(0, 0, 1), BlochVector(0, 0, -1), BlochVector(0, 0, 0)});
  const Decomposition d(s, MixtureWeights(Eigen::Vector3d(0.4, 0.2, 0.4)));
  EXPECT_EQ(matrix_rank(s), 2);
  const auto q = reduce(d);
  EXPECT_NEAR(q.weights()[0], 0.6, 1e-15);
  EXPECT_NEAR(q.weights()[1], 0.4, 1e-15);
  EXPECT_EQ(q.weights()[2], 0.0);
  EXPECT_NEAR((q.mixed_bloch().vec() - Vec3(0, 0, 0.2)).norm(), 0.0, 1e-15);
  EXPECT_EQ(q.support(), (std::vector<std::size_t>{0, 1}));
}

TEST(Reduce, RandomFullRankSets) {
  qtest::Rng rng(31);
  for (int n = 0; n < 200; ++n) {
    const auto s = rng.states(8);
    const Decomposition d(s, MixtureWeights(rng.simplex(8)));
    const auto t = reduce_traced(d);
    const auto& q = t.result;
    EXPECT_LE(q.support().size(), static_cast<std::size_t>(matrix_rank(s)));
    EXPECT_LE(q.support().size(), 4u);
    EXPECT_NEAR(q.weights().vec().sum(), 1.0, 1e-12);
    EXPECT_GE(q.weights().vec().minCoeff(), 0.0);
    EXPECT_LE((mix(s, q.weights()).vec() - d.mixed_bloch().vec()).norm(), 1e-10);
    // Every step keeps the mixture and shrinks the support.
    std::size_t prev = d.support().size();
    EXPECT_LE(t.steps.size(), s.size() - 1);
    for (const auto& st : t.steps) {
      EXPECT_LE(st.mixture_residual, 1e-10);
      EXPECT_LT(st.support_size, prev);
      prev = st.support_size;
    }
  }
}

TEST(Reduce, PauliOriginUniform) {
  const auto s = fixture("pauli_xyz6").states;
  const Decomposition d(s, MixtureWeights(Eigen::VectorXd::Constant(6, 1.0 / 6)));
  const auto q = reduce(d);
  EXPECT_LE(q.support().size(), 4u);
  EXPECT_LE(mix(s, q.weights()).norm(), 1e-12);
}

TEST(Reduce, InconsistentCachedMixture) {
  const StateSet s({BlochVector(0, 0, 1), BlochVector(0, 0, -1), BlochVector(0, 0, 0)});
  const Decomposition d(s, MixtureWeights(Eigen::Vector3d(0.4, 0.2, 0.4)), BlochVector(0, 0, 0.5));
  EXPECT_THROW(reduce(d), ContractError);
}

TEST(Reduce, InfeasibleWeights) {
  const StateSet s({BlochVector(0, 0, 1), BlochVector(0, 0, -1)});
  EXPECT_THROW(reduce(Decomposition(s, MixtureWeights(Eigen::Vector2d(0.7, 0.4)))), ValidationError);
}

TEST(Reduce, ZeroWeightsStayExplicit) {
  qtest::Rng rng(32);
  const auto s = rng.states(6);
  Eigen::VectorXd p = rng.simplex(6);
  const auto q = reduce(Decomposition(s, MixtureWeights(p)));
  EXPECT_EQ(q.weights().size(), 6u);
  EXPECT_EQ(q.set().size(), 6u);
}
