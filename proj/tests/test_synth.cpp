#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "kbclean/synth.hpp"
#include "support.hpp"

using namespace kbclean;

TEST_CASE("generator is deterministic per seed") {
    SynthSpec spec;
    spec.concepts = 40;
    spec.min_instances = 30;
    spec.max_instances = 50;
    spec.error_rate = 0.01;
    spec.homonym_rate = 0.005;
    spec.seed = 9;

    SynthResult a = generate_synthetic(spec);
    SynthResult b = generate_synthetic(spec);
    CHECK(a.kb == b.kb);
    CHECK(a.planted_errors.size() == b.planted_errors.size());

    spec.seed = 10;
    CHECK(generate_synthetic(spec).kb != a.kb);
}

TEST_CASE("error rate zero means empty ground truth") {
    SynthSpec spec;
    spec.concepts = 20;
    spec.min_instances = 10;
    spec.max_instances = 20;
    spec.error_rate = 0.0;
    spec.homonym_rate = 0.0;
    SynthResult result = generate_synthetic(spec);
    CHECK(result.planted_errors.empty());
    CHECK(result.planted_homonyms.empty());
}

TEST_CASE("weight-1 share lands within one percent of the target") {
    SynthSpec spec;
    spec.concepts = 200;
    spec.min_instances = 80;
    spec.max_instances = 120;
    spec.weight1_share = 0.653;
    spec.error_rate = 0.01;
    spec.homonym_rate = 0.001;
    spec.seed = 42;
    SynthResult result = generate_synthetic(spec);

    auto histogram = frequency_histogram(result.kb, {{1, 1}, {2, std::nullopt}});
    CHECK(histogram[0].second == doctest::Approx(65.3).epsilon(0.016));  // +-1 point
    CHECK(histogram[0].second + histogram[1].second == doctest::Approx(100.0));
}

TEST_CASE("homonym count follows rate x base triples") {
    SynthSpec spec;
    spec.concepts = 100;
    spec.min_instances = 100;
    spec.max_instances = 100;
    spec.error_rate = 0.0;
    spec.homonym_rate = 0.01;
    spec.seed = 5;
    SynthResult result = generate_synthetic(spec);
    CHECK(result.planted_homonyms.size() == 100);  // 0.01 * 10000
}

TEST_CASE("plants respect the classifier gates") {
    SynthSpec spec;
    spec.concepts = 60;
    spec.min_instances = 40;
    spec.max_instances = 80;
    spec.error_rate = 0.02;
    spec.homonym_rate = 0.005;
    spec.seed = 77;
    SynthResult result = generate_synthetic(spec);

    REQUIRE(!result.planted_errors.empty());
    for (const PlantedTriple& planted : result.planted_errors) {
        CHECK(planted.weight < spec.low_weight);
        CHECK(planted.source_weight > spec.big_weight);
        CHECK(planted.concept_name != planted.source_concept);
        CHECK(result.kb.contains(planted.concept_name, planted.instance));
        CHECK(result.kb.contains(planted.source_concept, planted.instance));
    }
    REQUIRE(!result.planted_homonyms.empty());
    for (const PlantedTriple& planted : result.planted_homonyms) {
        CHECK(planted.weight > spec.big_weight);
        CHECK(planted.source_weight > spec.big_weight);
    }
}

TEST_CASE("base vocabularies are disjoint except for plants") {
    SynthSpec spec;
    spec.concepts = 30;
    spec.min_instances = 20;
    spec.max_instances = 40;
    spec.error_rate = 0.01;
    spec.homonym_rate = 0.01;
    spec.seed = 8;
    SynthResult result = generate_synthetic(spec);

    std::set<std::pair<std::string, std::string>> planted;
    for (const PlantedTriple& p : result.planted_errors) {
        planted.emplace(p.concept_name, p.instance);
    }
    for (const PlantedTriple& p : result.planted_homonyms) {
        planted.emplace(p.concept_name, p.instance);
    }

    // an instance name carries its home concept as prefix; any triple filed
    // under a different concept must be a plant
    for (const Triple& t : result.kb.triples) {
        std::string home = t.instance.substr(0, t.instance.find('_'));
        if (home != t.concept_name) {
            CHECK(planted.contains({t.concept_name, t.instance}));
        }
    }
    CHECK(planted.size() == result.planted_errors.size() + result.planted_homonyms.size());
}

TEST_CASE("generator validates its spec") {
    SynthSpec spec;
    spec.error_rate = 1.5;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);

    spec = SynthSpec{};
    spec.min_instances = 50;
    spec.max_instances = 10;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);

    spec = SynthSpec{};
    spec.concepts = 1;
    spec.error_rate = 0.01;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);

    spec = SynthSpec{};
    spec.low_weight = 1;  // no weight below L exists to plant
    spec.error_rate = 0.01;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);

    spec = SynthSpec{};
    spec.tail_exponent = 1.0;
    CHECK_THROWS_AS(generate_synthetic(spec), std::invalid_argument);
}

TEST_CASE("planted tsv writer sorts rows") {
    std::vector<PlantedTriple> planted{
        {"zebra", "z_i1", 1, "other", 500},
        {"apple", "a_i1", 2, "other", 300},
    };
    std::ostringstream out;
    write_planted_tsv(out, planted);
    CHECK(out.str() ==
          "# concept\tinstance\tweight\tsource_concept\tsource_weight\n"
          "apple\ta_i1\t2\tother\t300\n"
          "zebra\tz_i1\t1\tother\t500\n");
}
