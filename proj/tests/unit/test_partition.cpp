#include <gtest/gtest.h>

#include <set>

#include <fracfluct/partition.hpp>

using namespace fracfluct;

TEST(PartitionTest, CanonicalLabels) {
    const Partition p(std::vector<int>{5, 5, 2, 7, 2});
    EXPECT_EQ(p.assignment(), (std::vector<int>{0, 0, 1, 2, 1}));
    EXPECT_EQ(p.num_blocks(), 3u);
    EXPECT_EQ(p.to_string(), "1,2;3,5;4");
    EXPECT_EQ(Partition::parse(5, "4;1,2;5,3"), p);
}

TEST(PartitionTest, ConstructionErrors) {
    EXPECT_THROW(Partition::from_blocks(3, {{0, 1}}), std::invalid_argument);
    EXPECT_THROW(Partition::from_blocks(3, {{0, 1}, {1, 2}}), std::invalid_argument);
    EXPECT_THROW(Partition::from_blocks(2, {{0, 2}}), std::invalid_argument);
    EXPECT_THROW(Partition::from_blocks(2, {{0, 1}, {}}), std::invalid_argument);
    EXPECT_THROW(Partition::parse(2, "1,x"), std::invalid_argument);
}

TEST(PartitionTest, SingletonsAndPairings) {
    const Partition p = Partition::parse(5, "1,3;2;4;5");
    EXPECT_EQ(p.singleton_blocks(), (std::vector<std::vector<int>>{{1}, {3}, {4}}));
    EXPECT_FALSE(p.is_pairing());
    EXPECT_TRUE(Partition::parse(4, "1,4;2,3").is_pairing());
    EXPECT_EQ(Partition::singletons(3).num_blocks(), 3u);
    EXPECT_EQ(Partition::one_block(3).num_blocks(), 1u);
}

TEST(Enumeration, CountsAreBellAndDoubleFactorial) {
    const std::uint64_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
    for (int n = 0; n <= 8; ++n) EXPECT_EQ(bell_number(n), bell[n]) << n;
    for (int n = 1; n <= 8; ++n) {
        const auto parts = enumerate_partitions(n);
        EXPECT_EQ(parts.size(), bell[n]) << n;
        EXPECT_EQ(std::set<Partition>(parts.begin(), parts.end()).size(), parts.size()) << n;
    }
    for (int n = 2; n <= 8; n += 2) {
        const auto pairs = enumerate_pairings(n);
        EXPECT_EQ(pairs.size(), double_factorial(n - 1)) << n;
        for (const auto& p : pairs) EXPECT_TRUE(p.is_pairing());
    }
    EXPECT_EQ(double_factorial(7), 105u);
    EXPECT_EQ(double_factorial(0), 1u);
}

TEST(Join, Examples) {
    const Partition a = Partition::parse(4, "1,2;3;4"), b = Partition::parse(4, "1;2,3;4");
    EXPECT_EQ(join(a, b), Partition::parse(4, "1,2,3;4"));
    EXPECT_EQ(join(a, a), a);
    EXPECT_EQ(join(a, Partition::one_block(4)), Partition::one_block(4));
    EXPECT_EQ(join(a, Partition::singletons(4)), a);
    EXPECT_THROW(join(a, Partition::singletons(3)), std::invalid_argument);
}

TEST(Diagram, ParseAndConnectivity) {
    const auto d = PairPartitionDiagram::parse("delta=1,2;3,4 p=1,3;2,4");
    EXPECT_EQ(d.size(), 4u);
    EXPECT_TRUE(d.connected());
    EXPECT_EQ(d.num_singletons(), 0u);
    EXPECT_EQ(d.to_string(), "delta=1,2;3,4 p=1,3;2,4");
    const auto split = PairPartitionDiagram::parse("delta=1,2;3,4 p=1,2;3,4");
    EXPECT_FALSE(split.connected());
    EXPECT_EQ(split.joined().num_blocks(), 2u);
    EXPECT_THROW(PairPartitionDiagram::parse("delta=1,2;3 p=1,2,3"), std::invalid_argument);
    EXPECT_THROW(PairPartitionDiagram::parse("delta=1,2"), std::invalid_argument);
    EXPECT_THROW(PairPartitionDiagram::parse("delta=1;2 q=1,2"), std::invalid_argument);
}

TEST(Diagram, RestrictionRelabels) {
    const auto d = PairPartitionDiagram::parse("delta=1,2;3;4,5,6 p=1,2;3,4;5,6");
    const auto r = d.restricted({2, 3, 4, 5});
    EXPECT_EQ(r.to_string(), "delta=1;2,3,4 p=1,2;3,4");
    EXPECT_EQ(r.num_singletons(), 1u);
}

TEST(Diagram, ConnectedEnumeration) {
    EXPECT_EQ(connected_pair_diagrams(2, true).size(), 2u);
    EXPECT_EQ(connected_pair_diagrams(2, false).size(), 1u);
    for (int n : {2, 4, 6}) {
        const auto all = connected_pair_diagrams(n, true);
        const auto nos = connected_pair_diagrams(n, false);
        EXPECT_LT(nos.size(), all.size());
        for (const auto& g : all) EXPECT_TRUE(g.connected());
        for (const auto& g : nos) EXPECT_EQ(g.num_singletons(), 0u);
    }
    EXPECT_THROW(connected_pair_diagrams(3, true), std::invalid_argument);
}
