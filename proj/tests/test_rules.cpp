#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "core/models.hpp"
#include "core/rule.hpp"
#include "support/generators.hpp"
#include "support/mining.hpp"
#include "support/sessions.hpp"
#include "support/toy_model.hpp"

using namespace dpi;
using namespace dpi::testing;

namespace {

Call gc() { return {"getConnection", std::nullopt, {}, {}}; }
Call cs(int c) { return {"Connection.createStatement", c, {}, {}}; }
Call eq(int s) { return {"Statement.executeQuery", s, {}, {}}; }
Call sclose(int s) { return {"Statement.close", s, {}, {}}; }
Call rclose(int r) { return {"ResultSet.close", r, {}, {}}; }
Call cclose(int c) { return {"Connection.close", c, {}, {}}; }

Rule rule_from(const PackageModel& model, const std::vector<Call>& setup, const Call& call,
               int id = 1) {
    return create_rule(model, execute(model, replay(model, setup), call), id);
}

std::set<NodeId> ids(const Nog& g) { return g.graph.nodes(); }

NestedAbstractObject make_nao(int id, const std::string& cls, bool pl = false, bool nj = false) {
    NestedAbstractObject n;
    n.id = id;
    n.ao.logical_id = id;
    n.ao.cls = cls;
    n.ao.preds = {{"p", true}};
    n.pl = pl;
    n.nj = nj;
    return n;
}

std::set<std::string> roleset(std::initializer_list<std::string> names) { return names; }

}  // namespace

TEST_CASE("a creator invocation yields a rule with only the new object") {
    auto model = make_model("jdbc");
    Rule r = rule_from(*model, {}, gc(), 3);
    CHECK(r.id == 3);
    CHECK(r.method == "getConnection");
    CHECK_FALSE(r.exception.has_value());
    CHECK_FALSE(r.ret.has_value());
    CHECK(r.trace.size() == 1);

    CHECK(r.ng.empty());
    CHECK(ids(r.ng2) == std::set<NodeId>{1});
    CHECK(r.ng2.nao(1).ao.cls == "Connection");
    CHECK(r.ng2.nao(1).ao.preds.at("c_open"));
    CHECK(r.ng2.nao(1).singular());

    CHECK(r.rng.nog.empty());
    CHECK(ids(r.rng2.nog) == std::set<NodeId>{1});
    CHECK(r.rng2.roles_of(1) == roleset({"new"}));
    CHECK(r.p.empty());
    CHECK(r.q.empty());
}

TEST_CASE("repeated creation lumps the new objects into one plural node") {
    auto model = make_model("jdbc");
    Snapshot sp0;
    Invocation i1 = execute(*model, sp0, gc());
    Invocation i2 = execute(*model, i1.sp_d, gc());
    Invocation i3 = execute(*model, i2.sp_d, gc());
    Invocation synth;
    synth.m = i1.m;
    synth.sp_s = sp0;
    synth.sp_d = i3.sp_d;
    synth.roles = {{1, "new"}, {2, "new"}, {3, "new"}};
    Rule r = create_rule(*model, synth, 7);

    CHECK(r.ng.empty());
    CHECK(ids(r.ng2) == std::set<NodeId>{1});
    CHECK(r.ng2.nao(1).pl);
    CHECK_FALSE(r.ng2.nao(1).nj);

    CHECK(r.rng.nog.empty());
    CHECK(ids(r.rng2.nog) == std::set<NodeId>{1, 2, 3});
    for (NodeId v : {1, 2, 3}) {
        CHECK(r.rng2.nog.nao(v).singular());
        CHECK(r.rng2.roles_of(v) == roleset({"new"}));
    }
    CHECK(r.p.empty());
    CHECK(r.q.empty());
}

TEST_CASE("closing an isolated connection maps the callee open to closed") {
    auto model = make_model("jdbc");
    Rule r = rule_from(*model, {gc()}, cclose(1));
    CHECK(r.method == "Connection.close");
    CHECK_FALSE(r.exception.has_value());

    CHECK(ids(r.ng) == std::set<NodeId>{1});
    CHECK(r.ng.nao(1).ao.preds.at("c_open"));
    CHECK(ids(r.ng2) == std::set<NodeId>{1});
    CHECK_FALSE(r.ng2.nao(1).ao.preds.at("c_open"));

    CHECK(r.rng.roles_of(1) == roleset({"callee"}));
    CHECK(r.rng2.roles_of(1) == roleset({"callee"}));
    CHECK(r.p.empty());
    CHECK(r.q == std::set<Mapping>{{1, 1, Mult::one}});
}

TEST_CASE("a query on the nine-object session matches the published cast shapes") {
    auto model = make_model("jdbc");
    Rule r = rule_from(*model, nine_object_trace(), eq(4), 11);
    CHECK(r.method == "Statement.executeQuery");
    CHECK_FALSE(r.exception.has_value());

    // Context graphs: the whole session reduces on both sides.
    CHECK(ids(r.ng) == std::set<NodeId>{1, 2, 3, 4, 5, 8, 9});
    CHECK(r.ng.nao(5).pl);
    CHECK(r.ng.nao(8).singular());
    CHECK(r.ng.nao(9).singular());
    CHECK(ids(r.ng2) == std::set<NodeId>{1, 2, 3, 4, 5, 8, 10});
    CHECK(r.ng2.nao(5).pl);
    CHECK(r.ng2.nao(8).pl);
    CHECK(r.ng2.nao(10).singular());

    // Cast graphs: connection above the callee statement, its result sets
    // below; the two closed result sets lump on the destination side.
    CHECK(ids(r.rng.nog) == std::set<NodeId>{1, 4, 8, 9});
    CHECK(r.rng.nog.graph.has_edge_between(4, 1, "conn"));
    CHECK(r.rng.nog.graph.has_edge_between(8, 4, "stmt"));
    CHECK(r.rng.nog.graph.has_edge_between(9, 4, "stmt"));
    CHECK(r.rng.roles_of(4) == roleset({"callee"}));
    CHECK(r.rng.nog.nao(9).ao.preds.at("r_open"));

    CHECK(ids(r.rng2.nog) == std::set<NodeId>{1, 4, 8, 10});
    CHECK(r.rng2.nog.nao(8).pl);
    CHECK_FALSE(r.rng2.nog.nao(8).ao.preds.at("r_open"));
    CHECK(r.rng2.nog.nao(10).singular());
    CHECK(r.rng2.nog.nao(10).ao.preds.at("r_open"));
    CHECK(r.rng2.roles_of(4) == roleset({"callee"}));
    CHECK(r.rng2.roles_of(10) == roleset({"new"}));

    // The old open result set flows onto the closed plural node.
    CHECK(r.q == std::set<Mapping>{{1, 1, Mult::one},
                                   {4, 4, Mult::one},
                                   {8, 8, Mult::one},
                                   {9, 8, Mult::one}});
    CHECK(r.p == std::set<Mapping>{{2, 2, Mult::one},
                                   {3, 3, Mult::one},
                                   {5, 5, Mult::many}});
}

TEST_CASE("exceptions leave the heap untouched") {
    auto model = make_model("jdbc");
    Rule r = rule_from(*model, {gc(), cs(1), sclose(2)}, eq(2));
    REQUIRE(r.exception.has_value());
    CHECK(*r.exception == "Statement not open");
    CHECK_FALSE(r.ret.has_value());

    CHECK(nog_identical(r.ng, r.ng2));
    CHECK(nog_identical(r.rng.nog, r.rng2.nog));
    CHECK(r.p.empty());
    CHECK(r.q == std::set<Mapping>{{1, 1, Mult::one}, {2, 2, Mult::one}});
}

TEST_CASE("context objects flow through p") {
    auto model = make_model("jdbc");
    // Two statements on the connection; querying one leaves the other as
    // pure context. The context statements lump on the source side only.
    Rule r = rule_from(*model, {gc(), cs(1), cs(1)}, eq(2));
    CHECK(ids(r.ng) == std::set<NodeId>{1, 2});
    CHECK(r.ng.nao(2).pl);
    CHECK(ids(r.ng2) == std::set<NodeId>{1, 2, 3, 4});
    for (NodeId v : {1, 2, 3, 4}) CHECK(r.ng2.nao(v).singular());
    CHECK(r.p == std::set<Mapping>{{2, 3, Mult::one}});
    CHECK(r.q == std::set<Mapping>{{1, 1, Mult::one}, {2, 2, Mult::one}});
}

TEST_CASE("parallel context flows merge into a many mapping") {
    auto model = make_model("jdbc");
    Rule r = rule_from(*model, {gc(), cs(1), cs(1), cs(1)}, eq(2));
    CHECK(ids(r.ng) == std::set<NodeId>{1, 2});
    CHECK(ids(r.ng2) == std::set<NodeId>{1, 2, 3, 5});
    CHECK(r.ng2.nao(3).pl);
    CHECK(r.p == std::set<Mapping>{{2, 3, Mult::many}});
}

TEST_CASE("parameter and return roles ride along the cast graphs") {
    auto toy = make_toy_model();
    std::vector<Call> made = {{"Box.create", std::nullopt, {}, {}},
                              {"Token.create", std::nullopt, {}, {}}};
    Rule put = rule_from(*toy, made, {"Box.put", 1, {2}, {}});
    CHECK(put.rng.roles_of(1) == roleset({"callee"}));
    CHECK(put.rng.roles_of(2) == roleset({"param_0"}));
    CHECK(put.rng2.nog.graph.has_edge_between(1, 2, "holds"));
    CHECK(put.q == std::set<Mapping>{{1, 1, Mult::one}, {2, 2, Mult::one}});

    std::vector<Call> held = made;
    held.push_back({"Box.put", 1, {2}, {}});
    Rule take = rule_from(*toy, held, {"Box.take", 1, {}, {}});
    CHECK_FALSE(take.exception.has_value());
    CHECK(take.rng.roles_of(2) == roleset({"return"}));
    CHECK(take.rng2.roles_of(2) == roleset({"return"}));
    CHECK(take.rng.nog.graph.has_edge_between(1, 2, "holds"));
    CHECK(take.rng2.nog.graph.edge_count() == 0);
    CHECK_FALSE(take.ng2.nao(1).ao.preds.at("full"));
    CHECK(take.q == std::set<Mapping>{{1, 1, Mult::one}, {2, 2, Mult::one}});

    Rule full = rule_from(*toy, held, {"Box.put", 1, {2}, {}});
    REQUIRE(full.exception.has_value());
    CHECK(*full.exception == "Full");
    CHECK(nog_identical(full.ng, full.ng2));
}

TEST_CASE("distinguished boolean results split rules") {
    auto model = make_model("hashset");
    std::vector<Call> created = {{"Set.create", std::nullopt, {}, {}}};
    Rule fresh = rule_from(*model, created, {"Set.add", 1, {}, {2}}, 1);
    REQUIRE(fresh.ret.has_value());
    CHECK(*fresh.ret == true);

    std::vector<Call> with2 = created;
    with2.push_back({"Set.add", 1, {}, {2}});
    Rule dup = rule_from(*model, with2, {"Set.add", 1, {}, {2}}, 2);
    REQUIRE(dup.ret.has_value());
    CHECK(*dup.ret == false);

    CHECK_FALSE(rule_covers(fresh, dup));
    CHECK_FALSE(rule_covers(dup, fresh));

    Rule creator = rule_from(*model, {}, {"Set.create", std::nullopt, {}, {}});
    CHECK_FALSE(creator.ret.has_value());
}

TEST_CASE("mapping covering follows the three clauses") {
    Nog sing_src, sing_dst, pl_src, pl_dst;
    sing_src.add(make_nao(1, "X"));
    sing_dst.add(make_nao(1, "X"));
    pl_src.add(make_nao(1, "X", true));
    pl_dst.add(make_nao(1, "X", true));
    Nog other;
    other.add(make_nao(1, "Y"));

    Mapping one{1, 1, Mult::one};
    Mapping many{1, 1, Mult::many};
    CHECK(mapping_covers(sing_src, sing_dst, one, sing_src, sing_dst, one));
    CHECK(mapping_covers(sing_src, sing_dst, one, pl_src, pl_dst, many));
    CHECK_FALSE(mapping_covers(pl_src, pl_dst, many, pl_src, pl_dst, one));
    CHECK_FALSE(mapping_covers(sing_src, sing_dst, one, other, sing_dst, one));
    CHECK_FALSE(mapping_covers(pl_src, sing_dst, one, sing_src, sing_dst, one));
}

TEST_CASE("rules mined from fuller heaps absorb the sparser ones") {
    auto model = make_model("jdbc");
    // One closed result set on the statement versus two: the two lump into a
    // plural node, which absorbs the singular shape but not vice versa.
    Rule narrow = rule_from(*model, {gc(), cs(1), eq(2), rclose(3)}, eq(2), 1);
    Rule wide =
        rule_from(*model, {gc(), cs(1), eq(2), rclose(3), eq(2), rclose(4)}, eq(2), 2);
    CHECK(wide.q.count({3, 3, Mult::many}) == 1);

    CHECK(rule_covers(narrow, narrow));
    CHECK(rule_covers(narrow, wide));
    CHECK_FALSE(rule_covers(wide, narrow));

    std::vector<Rule> pruned = prune_redundant({narrow, wide});
    REQUIRE(pruned.size() == 1);
    CHECK(pruned[0].id == 2);

    Rule excq = rule_from(*model, {gc(), cs(1), sclose(2)}, eq(2), 3);
    CHECK_FALSE(rule_covers(narrow, excq));
    CHECK_FALSE(rule_covers(excq, narrow));
}

TEST_CASE("rule isomorphism ignores node numbering but not structure") {
    auto model = make_model("jdbc");
    Rule a = rule_from(*model, {gc()}, cclose(1), 1);
    Rule b = rule_from(*model, {gc(), gc()}, cclose(2), 2);
    CHECK(ids(b.ng) == std::set<NodeId>{2});
    CHECK(rule_isomorphic(a, b));
    CHECK(rule_covers(a, b));
    CHECK(rule_covers(b, a));

    std::vector<Rule> pruned = prune_redundant({a, b});
    REQUIRE(pruned.size() == 1);
    CHECK(pruned[0].id == 1);

    Rule query = rule_from(*model, {gc(), cs(1)}, eq(2), 3);
    CHECK_FALSE(rule_isomorphic(a, query));
    Rule narrow = rule_from(*model, {gc(), cs(1), eq(2), rclose(3)}, eq(2), 4);
    Rule wide =
        rule_from(*model, {gc(), cs(1), eq(2), rclose(3), eq(2), rclose(4)}, eq(2), 5);
    CHECK_FALSE(rule_isomorphic(narrow, wide));
}

TEST_CASE("properties: rule covering is a preorder on mined rules") {
    int triples = 0;
    for (const char* name : {"jdbc", "arraylist", "hashset"}) {
        auto model = make_model(name);
        std::vector<Rule> rules = mine_rules(*model, 411, 45);
        REQUIRE(rules.size() == 45);
        const size_t n = rules.size();
        std::vector<std::vector<bool>> cov(n, std::vector<bool>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) cov[i][j] = rule_covers(rules[i], rules[j]);
        for (size_t i = 0; i < n; ++i) CHECK(cov[i][i]);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                if (!cov[i][j]) continue;
                for (size_t k = 0; k < n; ++k)
                    if (cov[j][k]) {
                        CHECK(cov[i][k]);
                        ++triples;
                    }
            }
    }
    CHECK(triples >= 200);
}

TEST_CASE("properties: pruning yields an antichain below the originals") {
    auto model = make_model("jdbc");
    std::vector<Rule> rules = mine_rules(*model, 97, 60);
    std::vector<Rule> pruned = prune_redundant(rules);
    CHECK(!pruned.empty());
    CHECK(pruned.size() <= rules.size());

    for (const Rule& a : pruned)
        for (const Rule& b : pruned)
            if (a.id != b.id) CHECK_FALSE(rule_covers(a, b));

    // Every dropped rule is covered by a survivor, and pruning again changes
    // nothing.
    std::set<int> kept;
    for (const Rule& r : pruned) kept.insert(r.id);
    for (const Rule& r : rules) {
        if (kept.count(r.id)) continue;
        bool covered = false;
        for (const Rule& k : pruned)
            if (rule_covers(r, k)) {
                covered = true;
                break;
            }
        CHECK(covered);
    }
    std::vector<Rule> again = prune_redundant(pruned);
    REQUIRE(again.size() == pruned.size());
    for (size_t i = 0; i < again.size(); ++i) CHECK(again[i].id == pruned[i].id);
}

TEST_CASE("properties: exception rules are pure") {
    int seen = 0;
    for (const char* name : {"jdbc", "arraylist", "hashset"}) {
        auto model = make_model(name);
        for (const Rule& r : mine_rules(*model, 5150, 60)) {
            if (!r.exception) continue;
            ++seen;
            CHECK(ids(r.ng) == ids(r.ng2));
            for (NodeId v : ids(r.ng)) CHECK(r.ng.nao(v).equivalent(r.ng2.nao(v)));
            for (const Mapping& m : r.p) CHECK(m.src == m.dst);
            for (const Mapping& m : r.q) CHECK(m.src == m.dst);
            CHECK(nog_identical(r.rng.nog, r.rng2.nog));
        }
    }
    CHECK(seen >= 10);
}

TEST_CASE("properties: mapping covering is a preorder") {
    Rng rng(2214);
    auto pick = [&rng](const Nog& g) {
        const std::set<NodeId>& ns = g.graph.nodes();
        auto it = ns.begin();
        std::advance(it, rng.below(static_cast<int>(ns.size())));
        return *it;
    };
    for (int i = 0; i < 200; ++i) {
        Nog src1 = random_nog(rng, 5);
        Nog dst1 = random_nog(rng, 5);
        Nog src2 = generalized_nog(rng, src1, 2, 1);
        Nog dst2 = generalized_nog(rng, dst1, 2, 1);
        Nog src3 = generalized_nog(rng, src2, 2, 1);
        Nog dst3 = generalized_nog(rng, dst2, 2, 1);

        Mapping m1{pick(src1), pick(dst1), rng.chance_percent(50) ? Mult::many : Mult::one};
        if (m1.mult == Mult::many &&
            (src1.nao(m1.src).singular() || dst1.nao(m1.dst).singular()))
            m1.mult = Mult::one;
        Mapping m2{m1.src, m1.dst, m1.mult == Mult::many || rng.chance_percent(50)
                                       ? Mult::many
                                       : Mult::one};
        if (m2.mult == Mult::many &&
            (src2.nao(m2.src).singular() || dst2.nao(m2.dst).singular()))
            m2.mult = m1.mult;
        Mapping m3{m2.src, m2.dst, m2.mult};

        CHECK(mapping_covers(src1, dst1, m1, src1, dst1, m1));
        CHECK(mapping_covers(src1, dst1, m1, src2, dst2, m2));
        CHECK(mapping_covers(src2, dst2, m2, src3, dst3, m3));
        CHECK(mapping_covers(src1, dst1, m1, src3, dst3, m3));
        if (m2.mult == Mult::many)
            CHECK_FALSE(mapping_covers(src2, dst2, m2, src1, dst1, {m1.src, m1.dst, Mult::one}));
    }
}
