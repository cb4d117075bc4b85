#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "koord/lang/checker.hpp"
#include "koord/lang/lexer.hpp"
#include "koord/lang/lower.hpp"
#include "koord/lang/parser.hpp"
#include "mem_store.hpp"

using namespace koord;
using namespace koord::lang;

namespace {

std::string read_app(const std::string& name) {
    std::ifstream in(std::string(KOORD_SOURCE_DIR) + "/apps/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CheckedProgram must_check(const std::string& src, int n) {
    auto r = check(parse_source(src), n);
    if (!r.ok()) {
        for (const auto& d : r.diagnostics) ADD_FAILURE() << format_diagnostic("src", d);
        throw std::runtime_error("check failed");
    }
    return *r.program;
}

std::vector<Diagnostic> diags(const std::string& src, int n = 3) {
    return check(parse_source(src), n).diagnostics;
}

} // namespace

TEST(Lexer, KeywordTokens) {
    auto t = tokenize("pre: true");
    ASSERT_EQ(t.size(), 4u);
    EXPECT_EQ(t[0].kind, TokenKind::KW_PRE);
    EXPECT_EQ(t[1].kind, TokenKind::COLON);
    EXPECT_EQ(t[2].kind, TokenKind::LIT_TRUE);
    EXPECT_EQ(t[3].kind, TokenKind::END_OF_FILE);
}

TEST(Lexer, IllegalCharacterPosition) {
    try {
        tokenize("x @ y");
        FAIL() << "expected a lexical error";
    } catch (const CompileError& e) {
        EXPECT_EQ(e.diagnostic().pos.line, 1);
        EXPECT_EQ(e.diagnostic().pos.col, 3);
    }
}

TEST(Lexer, CommentsAndPositions) {
    auto t = tokenize("# note\nx // more\n  y");
    std::vector<TokenKind> kinds;
    for (const auto& tok : t) kinds.push_back(tok.kind);
    ASSERT_GE(t.size(), 4u);
    EXPECT_EQ(t[0].kind, TokenKind::NEWLINE);
    EXPECT_EQ(t[1].text, "x");
    EXPECT_EQ(t[1].pos.line, 2);
    const auto& y = t[t.size() - 2];
    EXPECT_EQ(y.text, "y");
    EXPECT_EQ(y.pos.line, 3);
    EXPECT_EQ(y.pos.col, 3);
}

TEST(Lexer, TaskProgramEndsInEof) {
    auto t = tokenize(read_app("task.koord"));
    ASSERT_FALSE(t.empty());
    EXPECT_EQ(t.back().kind, TokenKind::END_OF_FILE);
}

TEST(Parser, TaskEventOrder) {
    auto p = parse_source(read_app("task.koord"));
    ASSERT_EQ(p.events.size(), 2u);
    EXPECT_EQ(p.events[0].name, "Assign");
    EXPECT_EQ(p.events[1].name, "Complete");
    EXPECT_TRUE(p.events[0].atomic);
}

TEST(Parser, EmptyEffectIsSyntaxError) {
    EXPECT_THROW(parse_source("event E {\n pre: true\n eff: {\n }\n}\n"), CompileError);
}

TEST(Parser, SyntaxErrorListsExpected) {
    try {
        parse_source("event E {\n pre true\n}\n");
        FAIL();
    } catch (const CompileError& e) {
        EXPECT_NE(std::string(e.what()).find("expected"), std::string::npos);
        EXPECT_EQ(e.diagnostic().pos.line, 2);
    }
}

TEST(Parser, AveragingIndexExpressions) {
    auto p = parse_source(read_app("averaging.koord"));
    ASSERT_EQ(p.events.size(), 1u);
    const auto& s = p.events[0].eff.at(0);
    ASSERT_EQ(s.kind, StmtKind::Assign);
    EXPECT_EQ(s.target.kind, ExprKind::Index);
    EXPECT_EQ(pretty_print(s.value), "(x[pid - 1] + x[pid + 1]) / 2");
}

TEST(Parser, RoundTripShippedPrograms) {
    for (const char* name : {"task.koord", "averaging.koord", "lineform.koord", "shapeform.koord"}) {
        auto src = read_app(name);
        ASSERT_FALSE(src.empty()) << name;
        auto a = parse_source(src);
        auto b = parse_source(pretty_print(a));
        EXPECT_TRUE(structurally_equal(a, b)) << name << "\n" << pretty_print(a);
    }
}

TEST(Parser, RoundTripTrickyPrecedence) {
    const char* src =
        "local {\n int a = 1\n int b = 2\n bool c\n}\n"
        "event E {\n pre: not (a < b) or c and a - (b - 1) == -(a * (b + 1)) % 3\n"
        " eff: {\n a = a - (b - a)\n if c {\n b = 1\n } else if a > 0 {\n b = 2\n } else {\n b = 3\n }\n }\n}\n";
    auto a = parse_source(src);
    auto b = parse_source(pretty_print(a));
    EXPECT_TRUE(structurally_equal(a, b)) << pretty_print(a);
}

TEST(Checker, TaskProgramIsClean) {
    auto r = check(parse_source(read_app("task.koord")), 3);
    EXPECT_TRUE(r.ok());
    EXPECT_TRUE(r.diagnostics.empty());
    EXPECT_TRUE(r.program->program.uses_motion);
}

TEST(Checker, NonAtomicSharedListWrite) {
    auto d = diags("allwrite {\n list<pos> list\n}\nevent E {\n pre: true\n eff: {\n list = [pos(0,0,0)]\n }\n}\n");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].message, "shared write requires atomic");
    EXPECT_EQ(d[0].pos.line, 7);
}

TEST(Checker, UndeclaredIdentifierPosition) {
    auto d = diags("event E {\n pre: foo > 1\n eff: {\n numAgents2 = 1\n }\n}\n");
    ASSERT_GE(d.size(), 1u);
    EXPECT_EQ(d[0].message, "undeclared identifier 'foo'");
    EXPECT_EQ(d[0].pos.line, 2);
    EXPECT_EQ(d[0].pos.col, 7);
}

TEST(Checker, AllreadOwnership) {
    const char* head = "allread {\n int r[]\n int g\n}\n";
    EXPECT_TRUE(diags(std::string(head) + "event E {\n pre: true\n eff: {\n r[pid] = 1\n }\n}\n").empty());
    EXPECT_FALSE(diags(std::string(head) + "atomic event E {\n pre: true\n eff: {\n r[pid+1] = 1\n }\n}\n").empty());
    EXPECT_FALSE(diags(std::string(head) + "atomic event E {\n pre: true\n eff: {\n g = 1\n }\n}\n").empty());
}

TEST(Checker, AllwriteOtherCellNeedsAtomic) {
    const char* head = "allwrite {\n int w[]\n}\n";
    EXPECT_FALSE(diags(std::string(head) + "event E {\n pre: true\n eff: {\n w[pid+1] = 1\n }\n}\n").empty());
    EXPECT_TRUE(diags(std::string(head) + "atomic event E {\n pre: true\n eff: {\n w[pid+1] = 1\n }\n}\n").empty());
}

TEST(Checker, TypeErrors) {
    EXPECT_FALSE(diags("local {\n int a\n}\nevent E {\n pre: a\n eff: {\n a = 1\n }\n}\n").empty());
    EXPECT_FALSE(diags("local {\n int a\n}\nevent E {\n pre: true\n eff: {\n a = true\n }\n}\n").empty());
    EXPECT_FALSE(diags("local {\n int a[]\n}\nevent E {\n pre: true\n eff: {\n a = 1\n }\n}\n").empty());
    EXPECT_FALSE(diags("local {\n int pid\n}\nevent E {\n pre: true\n eff: {\n pid = 1\n }\n}\n").empty());
    // int promotes to float
    EXPECT_TRUE(diags("local {\n float f\n}\nevent E {\n pre: true\n eff: {\n f = 1\n }\n}\n").empty());
}

TEST(Checker, AssignRequiresAtomic) {
    const char* head = "allwrite {\n list<pos> t\n}\n";
    EXPECT_FALSE(diags(std::string(head) + "event E {\n pre: true\n eff: {\n assign(t, 0, pid)\n }\n}\n").empty());
    EXPECT_TRUE(diags(std::string(head) + "atomic event E {\n pre: true\n eff: {\n assign(t, 0, pid)\n }\n}\n").empty());
}

TEST(Lower, AssignEventIsAtomic) {
    auto table = lower(must_check(read_app("task.koord"), 3));
    ASSERT_EQ(table.events.size(), 2u);
    EXPECT_EQ(table.events[0].name, "Assign");
    EXPECT_TRUE(table.events[0].atomic);
    EXPECT_FALSE(table.events[1].atomic);
}

TEST(Lower, NoEventsGivesEmptyTable) {
    auto table = lower(must_check("local {\n int a\n}\n", 2));
    EXPECT_TRUE(table.events.empty());
}

TEST(Lower, AveragingWritesMean) {
    auto table = lower(must_check(read_app("averaging.koord"), 3));
    MemStore store;
    store.shared = {{Value{0.0}, Value{3.0}, Value{6.0}}};
    Frame f{1, 3, &store};
    ASSERT_TRUE(table.events[0].enabled(f));
    table.events[0].eff(f);
    ASSERT_EQ(store.writes.size(), 1u);
    EXPECT_EQ(store.writes[0].first, std::make_pair(0, 1));
    EXPECT_EQ(std::get<double>(store.writes[0].second), 3.0);
}

TEST(Lower, SharedInitializerUsesCellIndex) {
    auto table = lower(must_check(read_app("averaging.koord"), 4));
    auto init = table.initial_shared(4);
    ASSERT_EQ(init.size(), 1u);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(std::get<double>(init[0][i]), i);
}

TEST(Lower, IndexWraparound) {
    auto table = lower(must_check("allwrite {\n int v[]\n}\nlocal {\n int k\n int got\n}\n"
                                  "event E {\n pre: true\n eff: {\n got = v[pid + k]\n }\n}\n",
                                  5));
    for (int n = 1; n <= 5; ++n) {
        for (int pid = 0; pid < n; ++pid) {
            for (int k = -7; k <= 7; ++k) {
                MemStore s;
                s.shared.assign(1, {});
                for (int i = 0; i < n; ++i) s.shared[0].push_back(Value{std::int64_t{100 + i}});
                s.locals = {Value{std::int64_t{k}}, Value{std::int64_t{0}}};
                Frame f{pid, n, &s};
                table.events[0].eff(f);
                int expect = ((pid + k) % n + n) % n;
                EXPECT_EQ(std::get<std::int64_t>(s.locals[1]), 100 + expect) << n << " " << pid << " " << k;
            }
        }
    }
}

TEST(Lower, DivisionByZeroFaults) {
    auto table = lower(must_check("local {\n int a\n float b\n}\nevent E {\n pre: true\n eff: {\n a = 1 / a\n }\n}\n"
                                  "event F {\n pre: true\n eff: {\n b = 1.0 / b\n }\n}\n",
                                  1));
    MemStore s;
    s.locals = {Value{std::int64_t{0}}, Value{0.0}};
    Frame f{0, 1, &s};
    EXPECT_THROW(table.events[0].eff(f), AgentFault);
    EXPECT_THROW(table.events[1].eff(f), AgentFault);
}

TEST(Lower, IntegerDivisionTruncates) {
    auto table = lower(must_check("local {\n int a = 7\n float b\n}\nevent E {\n pre: true\n eff: {\n a = a / 2\n b = 7 / 2.0\n }\n}\n", 1));
    MemStore s;
    s.locals = table.initial_locals(0, 1);
    Frame f{0, 1, &s};
    table.events[0].eff(f);
    EXPECT_EQ(std::get<std::int64_t>(s.locals[0]), 3);
    EXPECT_EQ(std::get<double>(s.locals[1]), 3.5);
}

TEST(Lower, LastWriteWinsWithinEffect) {
    auto table = lower(must_check("allwrite {\n int x[]\n}\nevent E {\n pre: true\n eff: {\n x[pid] = 1\n x[pid] = x[pid] + 5\n }\n}\n", 2));
    MemStore s;
    s.shared = {{Value{std::int64_t{0}}, Value{std::int64_t{0}}}};
    Frame f{0, 2, &s};
    table.events[0].eff(f);
    EXPECT_EQ(std::get<std::int64_t>(s.shared[0][0]), 6);
}

TEST(Lower, TaskStdlib) {
    auto table = lower(must_check(read_app("task.koord"), 2));
    MemStore s;
    s.shared = table.initial_shared(2);
    auto tasks_id = table.find_shared("tasks")->slot;
    auto route_id = table.find_shared("route")->slot;
    s.shared[tasks_id][0] = Value{to_pos_list({{1, 1, 0}, {2, 2, 0}})};
    s.locals = table.initial_locals(1, 2);
    s.psn = {0.5, 0.5, 0};
    Frame f{1, 2, &s};

    // first round only publishes the position
    EXPECT_FALSE(table.events[0].enabled(f));
    ASSERT_TRUE(table.events[1].enabled(f));
    table.events[1].eff(f);
    EXPECT_EQ(points_of(std::get<PosList>(s.shared[route_id][1])), std::vector<Vec3>{s.psn});

    // blocked planner backs off
    ASSERT_TRUE(table.events[0].enabled(f));
    table.events[0].eff(f);
    EXPECT_FALSE(table.events[0].enabled(f));
    EXPECT_TRUE(std::get<PosList>(s.shared[tasks_id][0])[0].claim < 0);
    table.events[1].eff(f);
    table.events[1].eff(f);
    ASSERT_TRUE(table.events[0].enabled(f));

    s.planned = to_pos_list({{0.5, 0.5, 0}, {2, 2, 0}});
    s.reached = false;
    table.events[0].eff(f);
    auto tasks = std::get<PosList>(s.shared[tasks_id][0]);
    // cand moved on from the failed task 0 to task 1
    EXPECT_EQ(tasks[1].claim, 1);
    EXPECT_EQ(tasks[0].claim, -1);
    EXPECT_EQ(s.actuated, s.planned);
    EXPECT_FALSE(table.events[1].enabled(f));
    s.reached = true;
    for (int i = 0; i < 12; ++i) {
        ASSERT_TRUE(table.events[1].enabled(f));
        table.events[1].eff(f);
    }
    EXPECT_TRUE(table.events[0].enabled(f));
}

TEST(Lower, DoubleClaimFaults) {
    auto table = lower(must_check("allwrite {\n list<pos> t\n}\natomic event E {\n pre: true\n eff: {\n assign(t, 0, pid)\n }\n}\n", 2));
    MemStore s;
    s.shared = {{Value{to_pos_list({{1, 1, 0}})}}};
    Frame f0{0, 2, &s};
    Frame f1{1, 2, &s};
    table.events[0].eff(f0);
    EXPECT_THROW(table.events[0].eff(f1), AgentFault);
}
