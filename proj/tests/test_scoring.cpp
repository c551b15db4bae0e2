#include "test_support.hpp"

#include <doctest.h>

using namespace yoco;

// Frozen hand arithmetic for the yt::hand_log() fixture (labels [0,1,2,0]).
// Derived independently in double precision from softmax error norms.
namespace frozen {
const double epoch0[4] = {0.5130334241487866, 0.6372489175771971, 0.5130334241487865,
                          1.0064595283027074};
const double lbpe_k2[4] = {0.41115626687321216, 0.561469088008625, 0.4420469166748066,
                           0.8372651702228526};
const double lbpe_all[4] = {0.4609878535314527, 0.6120217971009353, 0.5071142503089368,
                            0.8915218283424128};
const double aum[4] = {1.0, 0.5833333333333334, 0.8333333333333334, -0.5833333333333334};
const double entropy_final[4] = {1.0023219844441704, 1.0780996496508701, 1.0481303784221605,
                                 0.9422691549631332};
}  // namespace frozen

TEST_CASE("lbpe_per_epoch matches the documented corner cases") {
  DynamicsLog log = yt::hand_log();

  SUBCASE("one-hot probabilities score zero") {
    DynamicsLog sat;
    sat.num_samples = 1;
    sat.num_classes = 2;
    sat.labels = {0};
    EpochRecord rec;
    rec.accuracy = 1.0f;
    rec.logits.resize(1, 2);
    rec.logits << 1000.0f, 0.0f;  // softmax is exactly [1, 0]
    sat.epochs.push_back(rec);
    CHECK(lbpe_per_epoch(sat, 0)[0] == 0.0);
  }

  SUBCASE("even binary probabilities score sqrt(0.5)") {
    DynamicsLog even;
    even.num_samples = 1;
    even.num_classes = 2;
    even.labels = {0};
    EpochRecord rec;
    rec.accuracy = 0.0f;
    rec.logits = MatrixRXf::Zero(1, 2);
    even.epochs.push_back(rec);
    CHECK(lbpe_per_epoch(even, 0)[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  }

  SUBCASE("random rows match the independent norm oracle") {
    std::mt19937_64 rng(3);
    DynamicsLog rnd = yt::random_log(rng);
    for (std::uint32_t e = 0; e < rnd.num_epochs(); ++e) {
      VectorX<double> got = lbpe_per_epoch(rnd, e);
      for (std::uint32_t i = 0; i < rnd.num_samples; ++i) {
        std::vector<double> row;
        for (std::uint32_t c = 0; c < rnd.num_classes; ++c)
          row.push_back(rnd.epochs[e].logits(i, c));
        CHECK(got[i] == doctest::Approx(yt::oracle_error_norm(row, rnd.labels[i])).epsilon(1e-7));
      }
    }
  }

  SUBCASE("raw logit mode skips the softmax") {
    VectorX<double> raw = lbpe_per_epoch(log, 0, true);
    // sample 0: logits [1, .25, -.5] minus onehot(0) -> [0, .25, -.5]
    CHECK(raw[0] == doctest::Approx(std::sqrt(0.25 * 0.25 + 0.5 * 0.5)).epsilon(1e-12));
  }

  SUBCASE("epoch bounds are errors") {
    CHECK_THROWS_AS(lbpe_per_epoch(log, 3), ConfigError);
    CHECK_THROWS_AS(lbpe_per_epoch(log, -1), ConfigError);
  }
}

TEST_CASE("topk_epochs ranks accuracies with the stated tie rule") {
  CHECK(topk_epochs({0.1, 0.9, 0.5}, 2) == std::vector<int>{1, 2});
  CHECK(topk_epochs({0.4, 0.4, 0.4}, 2) == std::vector<int>{0, 1});
  CHECK(topk_epochs({0.1, 0.9, 0.5}, 3) == std::vector<int>{0, 1, 2});
  CHECK(topk_epochs({0.75, 1.0, 0.75}, 2) == std::vector<int>{0, 1});  // tie -> earlier
  CHECK_THROWS_AS(topk_epochs({0.1, 0.9}, 3), ConfigError);
  CHECK_THROWS_AS(topk_epochs({0.1, 0.9}, 0), ConfigError);
}

TEST_CASE("lbpe_score reproduces the frozen hand arithmetic") {
  DynamicsLog log = yt::hand_log();
  ScoreVector sv = lbpe_score(log, 3, 2);
  REQUIRE(sv.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(sv.scores[i] == doctest::Approx(frozen::lbpe_k2[i]).epsilon(1e-7));
  CHECK(sv.epochs_used == std::vector<int>{0, 1});
  CHECK(sv.metric == "lbpe");
  CHECK(sv.direction == ScoreDirection::lower_is_easier);
  CHECK(sv.warnings.empty());
  CHECK(sv.source_log_hash == log_digest(log));
}

TEST_CASE("lbpe_score with K = E_early = E is the plain mean") {
  DynamicsLog log = yt::hand_log();
  ScoreVector sv = lbpe_score(log, 3, 3);
  for (int i = 0; i < 4; ++i)
    CHECK(sv.scores[i] == doctest::Approx(frozen::lbpe_all[i]).epsilon(1e-7));

  // property on random logs: lbpe(E, E) equals the all-epoch average
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    DynamicsLog rnd = yt::random_log(rng);
    const int e = static_cast<int>(rnd.num_epochs());
    ScoreVector got = lbpe_score(rnd, e, e);
    VectorX<double> mean = VectorX<double>::Zero(rnd.num_samples);
    for (int t = 0; t < e; ++t) mean += lbpe_per_epoch(rnd, t);
    mean /= static_cast<double>(e);
    CHECK((got.scores - mean).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("lbpe_score clamps K and validates epoch windows") {
  DynamicsLog log = yt::hand_log();
  ScoreVector clamped = lbpe_score(log, 2, 5);  // K > E_early
  CHECK(clamped.epochs_used == std::vector<int>{0, 1});
  REQUIRE_FALSE(clamped.warnings.empty());
  CHECK(clamped.warnings[0].find("clamp") != std::string::npos);

  ScoreVector one = lbpe_score(log, 1, 1);  // degenerate average
  VectorX<double> epoch0 = lbpe_per_epoch(log, 0);
  CHECK((one.scores - epoch0).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(lbpe_score(log, 4, 2), ConfigError);  // E_early > E
  CHECK_THROWS_AS(lbpe_score(log, 0, 1), ConfigError);
}

TEST_CASE("lbpe softmax scores ignore constant logit shifts") {
  DynamicsLog log = yt::hand_log();
  DynamicsLog shifted = yt::hand_log();
  for (auto& rec : shifted.epochs) rec.logits.array() += 2.0f;  // exact in f32
  ScoreVector a = lbpe_score(log, 3, 2);
  ScoreVector b = lbpe_score(shifted, 3, 2);
  CHECK((a.scores - b.scores).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("el2n_score averages the first epochs") {
  DynamicsLog log = yt::hand_log();
  ScoreVector first = el2n_score(log, 1);
  VectorX<double> epoch0 = lbpe_per_epoch(log, 0);
  CHECK((first.scores - epoch0).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 4; ++i)
    CHECK(first.scores[i] == doctest::Approx(frozen::epoch0[i]).epsilon(1e-7));

  ScoreVector two = el2n_score(log, 2);
  for (int i = 0; i < 4; ++i)
    CHECK(two.scores[i] == doctest::Approx(frozen::lbpe_k2[i]).epsilon(1e-7));
  CHECK(two.metric == "el2n");
  CHECK(two.epochs_used == std::vector<int>{0, 1});

  // constant logits across epochs: any first_n gives the single-epoch value
  DynamicsLog flat = yt::hand_log();
  flat.epochs[1].logits = flat.epochs[0].logits;
  flat.epochs[2].logits = flat.epochs[0].logits;
  ScoreVector all = el2n_score(flat, 3);
  CHECK((all.scores - lbpe_per_epoch(flat, 0)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(el2n_score(log, 0), ConfigError);
  CHECK_THROWS_AS(el2n_score(log, 4), ConfigError);
}

TEST_CASE("forgetting_score counts correct-to-wrong transitions") {
  DynamicsLog log = yt::hand_log();
  ScoreVector sv = forgetting_score(log);
  CHECK(sv.scores[0] == 0.0);  // always correct
  CHECK(sv.scores[1] == 0.0);
  CHECK(sv.scores[2] == 0.0);
  CHECK(sv.scores[3] == 1.0);  // wrong, right, wrong again
  CHECK(sv.direction == ScoreDirection::lower_is_easier);

  // correctness [1,0,1,0] -> two forgetting events
  DynamicsLog alt;
  alt.num_samples = 1;
  alt.num_classes = 2;
  alt.labels = {0};
  for (int e = 0; e < 4; ++e) {
    EpochRecord rec;
    rec.accuracy = (e % 2 == 0) ? 1.0f : 0.0f;
    rec.logits.resize(1, 2);
    if (e % 2 == 0)
      rec.logits << 1.0f, 0.0f;
    else
      rec.logits << 0.0f, 1.0f;
    alt.epochs.push_back(rec);
  }
  CHECK(forgetting_score(alt).scores[0] == 2.0);

  // never correct over E=5 scores E by convention
  DynamicsLog never;
  never.num_samples = 1;
  never.num_classes = 2;
  never.labels = {0};
  for (int e = 0; e < 5; ++e) {
    EpochRecord rec;
    rec.accuracy = 0.0f;
    rec.logits.resize(1, 2);
    rec.logits << 0.0f, 1.0f;
    never.epochs.push_back(rec);
  }
  CHECK(forgetting_score(never).scores[0] == 5.0);

  // argmax ties resolve to the lower class id: logits [0,0] count as class 0
  DynamicsLog tie;
  tie.num_samples = 1;
  tie.num_classes = 2;
  tie.labels = {0};
  EpochRecord rec;
  rec.accuracy = 1.0f;
  rec.logits = MatrixRXf::Zero(1, 2);
  tie.epochs.push_back(rec);
  CHECK(forgetting_score(tie).scores[0] == 0.0);
}

TEST_CASE("aum_score averages raw logit margins") {
  DynamicsLog log = yt::hand_log();
  ScoreVector sv = aum_score(log);
  for (int i = 0; i < 4; ++i) CHECK(sv.scores[i] == doctest::Approx(frozen::aum[i]).epsilon(1e-7));
  CHECK(sv.direction == ScoreDirection::higher_is_easier);
  CHECK(sv.metric == "aum");

  // margins 0.5 then -0.3 average to 0.1
  DynamicsLog two;
  two.num_samples = 1;
  two.num_classes = 2;
  two.labels = {0};
  for (float other : {-0.5f, 0.3f}) {
    EpochRecord rec;
    rec.accuracy = 0.5f;
    rec.logits.resize(1, 2);
    rec.logits << 0.0f, other;
    two.epochs.push_back(rec);
  }
  CHECK(aum_score(two).scores[0] == doctest::Approx(0.1).epsilon(1e-7));

  // constant margin m stays m
  DynamicsLog con;
  con.num_samples = 1;
  con.num_classes = 3;
  con.labels = {1};
  for (int e = 0; e < 3; ++e) {
    EpochRecord rec;
    rec.accuracy = 1.0f;
    rec.logits.resize(1, 3);
    rec.logits << 0.25f, 1.5f, -2.0f;  // margin 1.5 - 0.25 = 1.25
    con.epochs.push_back(rec);
  }
  CHECK(aum_score(con).scores[0] == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("entropy_score reads the final epoch distribution") {
  DynamicsLog log = yt::hand_log();
  ScoreVector sv = entropy_score(log);
  for (int i = 0; i < 4; ++i)
    CHECK(sv.scores[i] == doctest::Approx(frozen::entropy_final[i]).epsilon(1e-7));

  // uniform logits over C=4 reach the ln 4 maximum
  DynamicsLog uni;
  uni.num_samples = 1;
  uni.num_classes = 4;
  uni.labels = {2};
  EpochRecord rec;
  rec.accuracy = 0.25f;
  rec.logits = MatrixRXf::Zero(1, 4);
  uni.epochs.push_back(rec);
  CHECK(entropy_score(uni).scores[0] == doctest::Approx(std::log(4.0)).epsilon(1e-7));

  // near-one-hot distribution collapses to zero entropy (0 ln 0 := 0)
  DynamicsLog hot;
  hot.num_samples = 1;
  hot.num_classes = 2;
  hot.labels = {0};
  EpochRecord hrec;
  hrec.accuracy = 1.0f;
  hrec.logits.resize(1, 2);
  hrec.logits << 1000.0f, 0.0f;
  hot.epochs.push_back(hrec);
  CHECK(entropy_score(hot).scores[0] == 0.0);

  // oracle agreement on random rows
  std::mt19937_64 rng(5);
  DynamicsLog rnd = yt::random_log(rng);
  ScoreVector got = entropy_score(rnd);
  const auto& last = rnd.epochs.back();
  for (std::uint32_t i = 0; i < rnd.num_samples; ++i) {
    std::vector<double> row;
    for (std::uint32_t c = 0; c < rnd.num_classes; ++c) row.push_back(last.logits(i, c));
    CHECK(got.scores[i] == doctest::Approx(yt::oracle_entropy(row)).epsilon(1e-7));
  }
}

TEST_CASE("ssp distance degenerates to the class mean at k = 1") {
  MatrixRXf feats(4, 2);
  feats << 0.0f, 0.0f, 2.0f, 0.0f, 10.0f, 4.0f, 12.0f, 4.0f;
  Eigen::VectorXi labels(4);
  labels << 0, 0, 1, 1;
  ScoreVector sv = ssp_distance_score(feats, labels, 1, 7);
  CHECK(sv.scores[0] == doctest::Approx(1.0).epsilon(1e-6));  // class-0 mean (1,0)
  CHECK(sv.scores[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sv.scores[2] == doctest::Approx(1.0).epsilon(1e-6));  // class-1 mean (11,4)
  CHECK(sv.scores[3] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sv.metric == "ssp_distance");
}

TEST_CASE("ssp with k = 2 resolves well-separated sub-blobs") {
  MatrixRXf feats(8, 2);
  feats << 0.0f, 0.0f, 0.2f, 0.0f, 10.0f, 0.0f, 10.2f, 0.0f,  // class 0: two pairs
      0.0f, 5.0f, 0.2f, 5.0f, 10.0f, 5.0f, 10.2f, 5.0f;       // class 1 mirrored
  Eigen::VectorXi labels(8);
  labels << 0, 0, 0, 0, 1, 1, 1, 1;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    ScoreVector sv = ssp_distance_score(feats, labels, 2, seed);
    for (int i = 0; i < 8; ++i) CHECK(sv.scores[i] == doctest::Approx(0.1).epsilon(1e-5));
  }
}

TEST_CASE("ssp handles duplicates and infeasible cluster counts") {
  MatrixRXf feats(3, 1);
  feats << 1.0f, 1.0f, 4.0f;
  Eigen::VectorXi labels(3);
  labels << 0, 0, 0;
  ScoreVector sv = ssp_distance_score(feats, labels, 2, 3);
  CHECK(sv.scores[0] == doctest::Approx(0.0));  // duplicates sit on their centroid
  CHECK(sv.scores[1] == doctest::Approx(0.0));
  CHECK(sv.scores[2] == doctest::Approx(0.0));

  CHECK_THROWS_AS(ssp_distance_score(feats, labels, 4, 3), InfeasibleError);
  CHECK_THROWS_AS(ssp_distance_score(feats, labels, 0, 3), ConfigError);

  // determinism
  BlobSpec spec;
  spec.num_classes = 2;
  spec.samples_per_class = 30;
  Dataset d = generate_blobs(spec, 17);
  ScoreVector a = ssp_distance_score(d.features, d.labels, 3, 9);
  ScoreVector b = ssp_distance_score(d.features, d.labels, 3, 9);
  CHECK(a.scores == b.scores);
}

TEST_CASE("scores survive the csv round-trip bit for bit") {
  yt::scratch_dir tmp("scores_rt");
  DynamicsLog log = yt::hand_log();
  ScoreVector sv = lbpe_score(log, 3, 2);
  write_scores_csv(sv, tmp.path("s.csv"), "config_hash=deadbeef");
  ScoreVector back = read_scores_csv(tmp.path("s.csv"));
  REQUIRE(back.size() == sv.size());
  CHECK(back.scores == sv.scores);  // %.17g preserves doubles exactly
  CHECK(back.metric == sv.metric);
  CHECK(back.direction == sv.direction);

  const std::string text = yt::slurp_text(tmp.path("s.csv"));
  CHECK(text.find("# config_hash=deadbeef") == 0);
  CHECK(text.find("sample_index,score,metric,direction") != std::string::npos);

  yt::spit(tmp.path("bad.csv"), "sample_index,score,metric,direction\n1,0.5,lbpe,lower_is_easier\n");
  CHECK_THROWS_AS(read_scores_csv(tmp.path("bad.csv")), IoError);  // index gap
  CHECK_THROWS_AS(read_scores_csv(tmp.path("absent.csv")), IoError);
}

TEST_CASE("per-sample metrics are permutation equivariant") {
  DynamicsLog log = yt::hand_log();
  DynamicsLog perm = yt::hand_log();
  const int order[4] = {2, 0, 3, 1};  // perm log row i <- original row order[i]
  for (int e = 0; e < 3; ++e)
    for (int i = 0; i < 4; ++i) perm.epochs[e].logits.row(i) = log.epochs[e].logits.row(order[i]);
  for (int i = 0; i < 4; ++i) perm.labels[i] = log.labels[order[i]];

  ScoreVector a = lbpe_score(log, 3, 2);
  ScoreVector b = lbpe_score(perm, 3, 2);
  for (int i = 0; i < 4; ++i) CHECK(b.scores[i] == doctest::Approx(a.scores[order[i]]).epsilon(1e-12));
  ScoreVector fa = forgetting_score(log);
  ScoreVector fb = forgetting_score(perm);
  for (int i = 0; i < 4; ++i) CHECK(fb.scores[i] == fa.scores[order[i]]);
}
