#include "test_support.hpp"

#include <doctest.h>

#include <set>

using namespace yoco;

namespace {

ScoreVector make_scores(std::initializer_list<double> values,
                        ScoreDirection dir = ScoreDirection::lower_is_easier) {
  ScoreVector sv;
  sv.metric = "test";
  sv.direction = dir;
  sv.scores.resize(static_cast<long>(values.size()));
  long i = 0;
  for (double v : values) sv.scores[i++] = v;
  return sv;
}

Eigen::VectorXi make_labels(std::initializer_list<int> values) {
  Eigen::VectorXi labels(static_cast<long>(values.size()));
  long i = 0;
  for (int v : values) labels[i++] = v;
  return labels;
}

}  // namespace

TEST_CASE("rank_select keeps the preferred end of the ranking") {
  ScoreVector sv = make_scores({0.1, 0.9, 0.5});
  Eigen::VectorXi labels = make_labels({0, 1, 0});

  SubsetIndex easy = rank_select(sv, labels, 2, 2, Prefer::easy);
  CHECK(easy.indices == std::vector<long>{0, 2});
  CHECK(easy.method == "rank");
  REQUIRE(easy.per_class_counts.size() == 2);
  CHECK(easy.per_class_counts[0] == 2);
  CHECK(easy.per_class_counts[1] == 0);

  SubsetIndex hard = rank_select(sv, labels, 2, 2, Prefer::hard);
  CHECK(hard.indices == std::vector<long>{1, 2});

  // higher_is_easier flips the orientation
  ScoreVector flipped = make_scores({0.1, 0.9, 0.5}, ScoreDirection::higher_is_easier);
  CHECK(rank_select(flipped, labels, 2, 2, Prefer::easy).indices == std::vector<long>{1, 2});

  // all-equal scores fall back to the index tie rule
  ScoreVector even = make_scores({0.4, 0.4, 0.4});
  CHECK(rank_select(even, labels, 2, 2, Prefer::easy).indices == std::vector<long>{0, 1});

  CHECK_THROWS_AS(rank_select(sv, labels, 2, 0, Prefer::easy), ConfigError);
  CHECK_THROWS_AS(rank_select(sv, labels, 2, 4, Prefer::easy), InfeasibleError);
}

TEST_CASE("balanced_select takes the per-class best and proves it by brute force") {
  ScoreVector sv = make_scores({0.5, 0.1, 0.9, 0.3, 0.8, 0.2});
  Eigen::VectorXi labels = make_labels({0, 0, 0, 1, 1, 1});

  SubsetIndex subset = balanced_select(sv, labels, 2, 2);
  CHECK(subset.indices == std::vector<long>{0, 1, 3, 5});
  CHECK(subset.per_class_counts[0] == 2);
  CHECK(subset.per_class_counts[1] == 2);

  // brute force: among all 2+2 balanced subsets this one has minimal score sum
  double best_sum = 1e18;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      for (int c = 3; c < 6; ++c)
        for (int d = c + 1; d < 6; ++d)
          best_sum = std::min(best_sum, sv.scores[a] + sv.scores[b] + sv.scores[c] + sv.scores[d]);
  double got_sum = 0.0;
  for (long i : subset.indices) got_sum += sv.scores[i];
  CHECK(got_sum == doctest::Approx(best_sum));

  // per_class equal to the class size returns the identity selection
  SubsetIndex all = balanced_select(sv, labels, 2, 3);
  CHECK(all.indices == std::vector<long>{0, 1, 2, 3, 4, 5});

  // prefer=hard keeps the top of each class instead
  SubsetIndex hard = balanced_select(sv, labels, 2, 1, false, Prefer::hard);
  CHECK(hard.indices == std::vector<long>{2, 4});
}

TEST_CASE("balanced_select reports every deficient class or clamps") {
  ScoreVector sv = make_scores({0.5, 0.1, 0.9, 0.3});
  Eigen::VectorXi labels = make_labels({0, 0, 1, 2});

  try {
    balanced_select(sv, labels, 3, 2);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("class 1") != std::string::npos);  // has 1, needs 2
    CHECK(msg.find("class 2") != std::string::npos);  // has 1, needs 2
    CHECK(msg.find("class 0") == std::string::npos);  // satisfied
  }

  SubsetIndex clamped = balanced_select(sv, labels, 3, 2, true);
  CHECK(clamped.indices == std::vector<long>{0, 1, 2, 3});
  CHECK(clamped.per_class_counts[0] == 2);
  CHECK(clamped.per_class_counts[1] == 1);
  REQUIRE(clamped.parameters.count("clamped_classes") == 1);
  const std::string note = clamped.parameters.at("clamped_classes");
  CHECK(note.find("1") != std::string::npos);
  CHECK(note.find("2") != std::string::npos);

  CHECK_THROWS_AS(balanced_select(sv, labels, 3, 0), ConfigError);
}

TEST_CASE("ccs_select drops the hardest tail and fills bins evenly") {
  // scores 0..9: cutoff 0.2 drops {8,9}; two bins [0,4) and [4,8); budget 4
  // takes two per bin.
  ScoreVector sv = make_scores({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  Eigen::VectorXi labels(10);
  for (long i = 0; i < 10; ++i) labels[i] = static_cast<int>(i % 2);

  SubsetIndex subset = ccs_select(sv, labels, 2, 4, 0.2, 2, 5);
  REQUIRE(subset.size() == 4);
  int low_bin = 0, high_bin = 0;
  for (long i : subset.indices) {
    CHECK(i < 8);  // hardest two never appear
    if (sv.scores[i] < 4.0)
      ++low_bin;
    else
      ++high_bin;
  }
  CHECK(low_bin == 2);
  CHECK(high_bin == 2);
  CHECK(subset.method == "ccs");

  // deterministic per seed
  SubsetIndex again = ccs_select(sv, labels, 2, 4, 0.2, 2, 5);
  CHECK(again.indices == subset.indices);

  // budget larger than the survivor pool is infeasible
  CHECK_THROWS_AS(ccs_select(sv, labels, 2, 9, 0.2, 2, 5), InfeasibleError);
  CHECK_THROWS_AS(ccs_select(sv, labels, 2, 4, 1.0, 2, 5), ConfigError);
  CHECK_THROWS_AS(ccs_select(sv, labels, 2, 4, 0.2, 0, 5), ConfigError);
}

TEST_CASE("degenerate ccs reduces to random_select") {
  ScoreVector sv = make_scores({3, 1, 4, 1, 5, 9, 2, 6});
  Eigen::VectorXi labels(8);
  for (long i = 0; i < 8; ++i) labels[i] = static_cast<int>(i % 2);
  SubsetIndex ccs = ccs_select(sv, labels, 2, 3, 0.0, 1, 77);
  SubsetIndex rnd = random_select(8, 3, 77);
  CHECK(ccs.indices == rnd.indices);
  CHECK(ccs.method == "ccs");
}

TEST_CASE("random_select draws without replacement, deterministically") {
  SubsetIndex all = random_select(5, 5, 1);
  CHECK(all.indices == std::vector<long>{0, 1, 2, 3, 4});

  SubsetIndex some = random_select(100, 10, 1);
  CHECK(some.size() == 10);
  std::set<long> unique(some.indices.begin(), some.indices.end());
  CHECK(unique.size() == 10);
  CHECK(*unique.rbegin() < 100);
  CHECK(random_select(100, 10, 1).indices == some.indices);
  CHECK(random_select(100, 10, 2).indices != some.indices);
  CHECK(some.per_class_counts.size() == 0);  // labels unknown here

  Eigen::VectorXi labels = Eigen::VectorXi::Zero(100);
  SubsetIndex counted = some;
  attach_class_counts(counted, labels, 1);
  REQUIRE(counted.per_class_counts.size() == 1);
  CHECK(counted.per_class_counts[0] == 10);

  CHECK_THROWS_AS(random_select(5, 0, 1), ConfigError);
  CHECK_THROWS_AS(random_select(5, 6, 1), InfeasibleError);
}

TEST_CASE("as_easy_hard_split returns complementary extremes") {
  ScoreVector sv = make_scores({0.3, 0.1, 0.6, 0.2, 0.9, 0.5, 0.4, 0.8, 0.0, 0.7});
  Eigen::VectorXi labels(10);
  for (long i = 0; i < 10; ++i) labels[i] = static_cast<int>(i % 2);

  auto [easy, hard] = as_easy_hard_split(sv, labels, 2, 0.5);
  CHECK(easy.size() == 5);
  CHECK(hard.size() == 5);
  std::set<long> seen(easy.indices.begin(), easy.indices.end());
  for (long i : hard.indices) CHECK(seen.count(i) == 0);  // disjoint
  std::set<long> all(easy.indices.begin(), easy.indices.end());
  all.insert(hard.indices.begin(), hard.indices.end());
  CHECK(all.size() == 10);  // union covers everything at ratio 0.5

  auto [e9, h9] = as_easy_hard_split(sv, labels, 2, 0.9);
  REQUIRE(e9.size() == 1);
  REQUIRE(h9.size() == 1);
  CHECK(e9.indices[0] == 8);  // score 0.0
  CHECK(h9.indices[0] == 4);  // score 0.9

  CHECK_THROWS_AS(as_easy_hard_split(sv, labels, 2, 0.99), ConfigError);  // keeps 0
  CHECK_THROWS_AS(as_easy_hard_split(sv, labels, 2, 0.01), ConfigError);  // keeps N
}

TEST_CASE("selections are invariant under monotone score transforms") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  std::uniform_int_distribution<int> lab(0, 2);

  for (int trial = 0; trial < 50; ++trial) {
    const long n = 12;
    ScoreVector sv;
    sv.metric = "test";
    sv.scores.resize(n);
    Eigen::VectorXi labels(n);
    for (long i = 0; i < n; ++i) {
      sv.scores[i] = unit(rng);
      labels[i] = lab(rng);
    }
    // force feasibility: three samples of every class
    labels[0] = 0; labels[1] = 0; labels[2] = 0;
    labels[3] = 1; labels[4] = 1; labels[5] = 1;
    labels[6] = 2; labels[7] = 2; labels[8] = 2;

    ScoreVector affine = sv;
    affine.scores = 2.0 * sv.scores.array() + 1.0;
    ScoreVector squashed = sv;
    for (long i = 0; i < n; ++i) squashed.scores[i] = std::atan(sv.scores[i] / 100.0);

    for (const ScoreVector* t : {&affine, &squashed}) {
      CHECK(rank_select(*t, labels, 3, 4, Prefer::easy).indices ==
            rank_select(sv, labels, 3, 4, Prefer::easy).indices);
      CHECK(balanced_select(*t, labels, 3, 2).indices == balanced_select(sv, labels, 3, 2).indices);
      auto [te, th] = as_easy_hard_split(*t, labels, 3, 0.5);
      auto [se, sh] = as_easy_hard_split(sv, labels, 3, 0.5);
      CHECK(te.indices == se.indices);
      CHECK(th.indices == sh.indices);
    }
  }
}

TEST_CASE("balanced_select agrees with the brute-force oracle on random instances") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int num_classes = 2 + static_cast<int>(rng() % 3);
    const long per_class = 1 + static_cast<long>(rng() % 3);
    ScoreVector sv;
    sv.metric = "test";
    sv.direction = (rng() & 1) ? ScoreDirection::higher_is_easier : ScoreDirection::lower_is_easier;
    const long n = num_classes * (per_class + static_cast<long>(rng() % 4));
    sv.scores.resize(n);
    Eigen::VectorXi labels(n);
    for (long i = 0; i < n; ++i) {
      sv.scores[i] = unit(rng);
      labels[i] = static_cast<int>(i % num_classes);  // feasible by construction
    }
    const Prefer prefer = (rng() & 1) ? Prefer::easy : Prefer::hard;
    SubsetIndex got = balanced_select(sv, labels, num_classes, per_class, false, prefer);
    CHECK(got.indices == yt::oracle_balanced(sv, labels, num_classes, per_class, prefer));
  }
}

TEST_CASE("subset files round-trip with their sidecar") {
  yt::scratch_dir tmp("subset_rt");
  ScoreVector sv = make_scores({0.5, 0.1, 0.9, 0.3, 0.8, 0.2});
  sv.metric = "lbpe";
  sv.source_log_hash = 0xabcdef12u;
  Eigen::VectorXi labels = make_labels({0, 0, 0, 1, 1, 1});
  SubsetIndex subset = balanced_select(sv, labels, 2, 2);

  write_subset(subset, tmp.path("s.csv"));
  SubsetIndex back = read_subset(tmp.path("s.csv"));
  CHECK(back.indices == subset.indices);
  CHECK(back.method == "balanced");
  CHECK(back.parameters.at("metric") == "lbpe");
  REQUIRE(back.per_class_counts.size() == 2);
  CHECK(back.per_class_counts[0] == 2);

  // indices alone still parse when the sidecar is gone
  std::filesystem::remove(tmp.path("s.csv.json"));
  SubsetIndex bare = read_subset(tmp.path("s.csv"));
  CHECK(bare.indices == subset.indices);
  CHECK(bare.method.empty());

  // a header-only file is an empty subset, not an io failure
  yt::spit(tmp.path("empty.csv"), "sample_index\n");
  CHECK(read_subset(tmp.path("empty.csv")).indices.empty());

  yt::spit(tmp.path("junk.csv"), "sample_index\nfive\n");
  CHECK_THROWS_AS(read_subset(tmp.path("junk.csv")), IoError);
  CHECK_THROWS_AS(read_subset(tmp.path("absent.csv")), IoError);
}

TEST_CASE("validate_subset rejects malformed index lists") {
  SubsetIndex ok;
  ok.indices = {0, 2, 5};
  CHECK_NOTHROW(validate_subset(ok, 6));

  SubsetIndex dup;
  dup.indices = {0, 2, 2};
  CHECK_THROWS_AS(validate_subset(dup, 6), ConfigError);
  SubsetIndex unsorted;
  unsorted.indices = {2, 0};
  CHECK_THROWS_AS(validate_subset(unsorted, 6), ConfigError);
  SubsetIndex oob;
  oob.indices = {0, 6};
  CHECK_THROWS_AS(validate_subset(oob, 6), ConfigError);
  SubsetIndex neg;
  neg.indices = {-1, 0};
  CHECK_THROWS_AS(validate_subset(neg, 6), ConfigError);
}

TEST_CASE("validate_target wants exactly one budget form") {
  SelectionTarget both;
  both.total_count = 10;
  both.per_class = 5;
  CHECK_THROWS_AS(validate_target(both), ConfigError);
  SelectionTarget none;
  CHECK_THROWS_AS(validate_target(none), ConfigError);
  SelectionTarget ok;
  ok.total_count = 10;
  CHECK_NOTHROW(validate_target(ok));
}
