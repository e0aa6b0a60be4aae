#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gubm/errors.hpp>
#include <gubm/logio.hpp>

#include <string>
#include <vector>

#include "testutil.hpp"

using namespace gubm;
using testutil::make_session;
using testutil::TempDir;

namespace {

const std::string kHeader = "#gubm-log\tv1\n";

std::string log_line(const std::string& sid, const std::string& qid,
                     const std::string& rows, const std::string& images,
                     const std::string& events) {
    return sid + "\t" + qid + "\t" + rows + "\t" + images + "\t" + events + "\n";
}

}  // namespace

TEST_CASE("sessions survive a save and load round trip") {
    std::vector<Session> sessions;
    sessions.push_back(make_session({2, 3}, {{0, 1}, {1, 2}, {1, 2}}, "query one", "s0"));
    sessions[0].events[1].kind = EventKind::Click;
    sessions.push_back(make_session({4}, {}, "query one", "s1"));
    for (int i = 2; i < 12; ++i)
        sessions.push_back(make_session({2, 3}, {{1, 0}}, "query one",
                                        "s" + std::to_string(i)));
    TempDir dir;
    save_sessions(sessions, dir.file("log.tsv"));

    LoadFilters filters;
    filters.min_sessions_per_query = 1;
    auto loaded = load_sessions(dir.file("log.tsv"), filters);
    REQUIRE(loaded.size() == sessions.size());
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        CHECK(loaded[i].session_id == sessions[i].session_id);
        CHECK(loaded[i].query_id == sessions[i].query_id);
        CHECK(loaded[i].layout == sessions[i].layout);
        CHECK(loaded[i].images == sessions[i].images);
        REQUIRE(loaded[i].events.size() == sessions[i].events.size());
        for (std::size_t e = 0; e < sessions[i].events.size(); ++e) {
            CHECK(loaded[i].events[e].t_ms == sessions[i].events[e].t_ms);
            CHECK(loaded[i].events[e].kind == sessions[i].events[e].kind);
            CHECK(loaded[i].events[e].position == sessions[i].events[e].position);
        }
    }
    // A second save of the loaded data is byte-identical.
    save_sessions(loaded, dir.file("log2.tsv"));
    CHECK(testutil::read_text(dir.file("log.tsv")) ==
          testutil::read_text(dir.file("log2.tsv")));
}

TEST_CASE("events are sorted by timestamp on ingest") {
    TempDir dir;
    testutil::write_text(dir.file("log.tsv"),
                         kHeader + log_line("s0", "q0", "3", "a,b,c",
                                            "300,H,0,2;100,C,0,1"));
    LoadFilters open;
    open.min_sessions_per_query = 1;
    auto loaded = load_sessions(dir.file("log.tsv"), open);
    REQUIRE(loaded.size() == 1);
    REQUIRE(loaded[0].events.size() == 2);
    CHECK(loaded[0].events[0].t_ms == 100);
    CHECK(loaded[0].events[0].kind == EventKind::Click);
    CHECK(loaded[0].events[1].t_ms == 300);
}

TEST_CASE("malformed logs are rejected with the offending line") {
    TempDir dir;
    LoadFilters open;
    open.min_sessions_per_query = 1;
    auto expect_error = [&](const std::string& text, const std::string& needle) {
        testutil::write_text(dir.file("bad.tsv"), text);
        try {
            load_sessions(dir.file("bad.tsv"), open);
            FAIL("expected DataError for: ", needle);
        } catch (const DataError& e) {
            const std::string got = e.what();
            CHECK_MESSAGE(got.find(needle) != std::string::npos,
                          "needle=", needle, " got=", got);
        }
    };
    expect_error("not a header\n", "not a v1 session log");
    expect_error(kHeader + "s0\tq0\t3\ta,b,c\n", "line 2");
    expect_error(kHeader + log_line("s0", "q0", "3", "a,b,c", "100,X,0,0"),
                 "unknown event kind");
    expect_error(kHeader + log_line("s0", "q0", "3", "a,b", ""), "line 2");
    expect_error(kHeader + log_line("s0", "q0", "3", "a,b,c", "100,H,0,9"),
                 "line 2");
    expect_error(kHeader + log_line("s0", "q0", "0", "", ""), "line 2");
    expect_error(kHeader + log_line("s0", "q0", "3", "a,b,c", "oops,H,0,0"),
                 "line 2");
    expect_error(kHeader + log_line("s0", "q0", "3", "a,b,c", "") +
                     log_line("s0", "q0", "3", "a,b,c", ""),
                 "duplicate session");
    expect_error(kHeader + "\n" + log_line("s0", "q0", "3", "a,b,c", ""),
                 "line 2");
    expect_error("", "not a v1 session log");
}

TEST_CASE("missing file is a data error") {
    CHECK_THROWS_AS(load_sessions("/nonexistent/gubm.tsv"), DataError);
}

TEST_CASE("per-query minimum drops sparse queries") {
    TempDir dir;
    std::string text = kHeader;
    for (int i = 0; i < 9; ++i)
        text += log_line("sparse" + std::to_string(i), "rare", "2", "a,b", "");
    for (int i = 0; i < 10; ++i)
        text += log_line("dense" + std::to_string(i), "common", "2", "a,b", "");
    testutil::write_text(dir.file("log.tsv"), text);

    LoadStats stats;
    auto loaded = load_sessions(dir.file("log.tsv"), LoadFilters{}, &stats);
    CHECK(loaded.size() == 10);
    for (const auto& s : loaded) CHECK(s.query_id == "common");
    CHECK(stats.sessions_read == 19);
    CHECK(stats.sessions_kept == 10);
    CHECK(stats.queries_kept == 1);
    CHECK(stats.queries_dropped_min == 1);
    CHECK(stats.sessions_dropped_min == 9);
}

TEST_CASE("per-query cap keeps the first sessions in file order") {
    TempDir dir;
    std::string text = kHeader;
    for (int i = 0; i < 5; ++i)
        text += log_line("s" + std::to_string(i), "q0", "2", "a,b", "");
    testutil::write_text(dir.file("log.tsv"), text);

    LoadFilters filters;
    filters.min_sessions_per_query = 1;
    filters.max_sessions_per_query = 3;
    LoadStats stats;
    auto loaded = load_sessions(dir.file("log.tsv"), filters, &stats);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0].session_id == "s0");
    CHECK(loaded[2].session_id == "s2");
    CHECK(stats.sessions_dropped_cap == 2);
}

TEST_CASE("clicks-only mode drops hover events") {
    TempDir dir;
    testutil::write_text(
        dir.file("log.tsv"),
        kHeader + log_line("s0", "q0", "2,2", "a,b,c,d",
                           "100,H,0,0;200,H,0,1;300,C,1,0;400,H,1,1"));
    LoadFilters filters;
    filters.min_sessions_per_query = 1;
    filters.clicks_only = true;
    LoadStats stats;
    auto loaded = load_sessions(dir.file("log.tsv"), filters, &stats);
    REQUIRE(loaded.size() == 1);
    REQUIRE(loaded[0].events.size() == 1);
    CHECK(loaded[0].events[0].kind == EventKind::Click);
    CHECK(loaded[0].events[0].position == GridPosition{1, 0});
    CHECK(stats.events_dropped_kind == 3);
}

TEST_CASE("hover dwell is the gap to the next event in the raw timeline") {
    TempDir dir;
    // Hover at 0 lasts 50ms (dropped), hover at 50 lasts 150ms (kept),
    // the final hover has no successor and is kept.
    testutil::write_text(
        dir.file("log.tsv"),
        kHeader + log_line("s0", "q0", "4", "a,b,c,d",
                           "0,H,0,0;50,H,0,1;200,C,0,2;500,H,0,3"));
    LoadFilters filters;
    filters.min_sessions_per_query = 1;
    filters.min_hover_dwell_ms = 100;
    LoadStats stats;
    auto loaded = load_sessions(dir.file("log.tsv"), filters, &stats);
    REQUIRE(loaded.size() == 1);
    REQUIRE(loaded[0].events.size() == 3);
    CHECK(loaded[0].events[0].position == GridPosition{0, 1});
    CHECK(loaded[0].events[1].position == GridPosition{0, 2});
    CHECK(loaded[0].events[2].position == GridPosition{0, 3});
    CHECK(stats.events_dropped_dwell == 1);
    // Clicks never face the dwell filter.
    CHECK(loaded[0].events[1].kind == EventKind::Click);
}

TEST_CASE("truncation trims the grid and the events on it") {
    auto s = make_session({4, 5}, {{0, 2}, {1, 1}, {1, 3}});
    std::size_t dropped = 0;
    auto t = truncate_session(s, 6, &dropped);
    CHECK(t.layout == GridLayout({4, 2}));
    REQUIRE(t.images.size() == 6);
    CHECK(t.images.back() == "img5");
    // (1,1) is row-major index 5 (kept); (1,3) is index 7 (dropped).
    REQUIRE(t.events.size() == 2);
    CHECK(t.events[0].position == GridPosition{0, 2});
    CHECK(t.events[1].position == GridPosition{1, 1});
    CHECK(dropped == 1);
    CHECK_NOTHROW(validate_session(t));

    // k of zero or beyond the page is a no-op.
    CHECK(truncate_session(s, 0).layout == s.layout);
    CHECK(truncate_session(s, 100).layout == s.layout);
    CHECK(truncate_session(s, 9).layout == s.layout);
    // Exact row boundary keeps whole rows.
    CHECK(truncate_session(s, 4).layout == GridLayout({4}));
}

TEST_CASE("load applies truncation before other event filters") {
    TempDir dir;
    // The hover at (1,1) sits beyond K=2 so it counts as a truncation drop,
    // not a kind drop, even in clicks-only mode.
    testutil::write_text(dir.file("log.tsv"),
                         kHeader + log_line("s0", "q0", "2,2", "a,b,c,d",
                                            "100,H,1,1;200,C,0,1"));
    LoadFilters filters;
    filters.min_sessions_per_query = 1;
    filters.clicks_only = true;
    filters.truncation = 2;
    LoadStats stats;
    auto loaded = load_sessions(dir.file("log.tsv"), filters, &stats);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].layout == GridLayout({2}));
    REQUIRE(loaded[0].events.size() == 1);
    CHECK(loaded[0].events[0].kind == EventKind::Click);
    CHECK(stats.events_dropped_truncation == 1);
    CHECK(stats.events_dropped_kind == 0);
}

TEST_CASE("empty sessions can be kept or dropped") {
    TempDir dir;
    std::string text = kHeader;
    text += log_line("s0", "q0", "2", "a,b", "100,H,0,1");
    text += log_line("s1", "q0", "2", "a,b", "");
    testutil::write_text(dir.file("log.tsv"), text);

    LoadFilters keep;
    keep.min_sessions_per_query = 1;
    CHECK(load_sessions(dir.file("log.tsv"), keep).size() == 2);

    LoadFilters drop = keep;
    drop.drop_empty_sessions = true;
    LoadStats stats;
    auto loaded = load_sessions(dir.file("log.tsv"), drop, &stats);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].session_id == "s0");
    CHECK(stats.sessions_dropped_empty == 1);

    // A session emptied by filtering counts as empty too.
    LoadFilters strict = drop;
    strict.clicks_only = true;
    auto none = load_sessions(dir.file("log.tsv"), strict, &stats);
    CHECK(none.empty());
}

TEST_CASE("session ids with reserved characters are rejected on save") {
    auto s = make_session({2}, {});
    s.session_id = "has\ttab";
    TempDir dir;
    CHECK_THROWS_AS(save_sessions({s}, dir.file("log.tsv")), DataError);
    s.session_id = "has;semicolon";
    CHECK_THROWS_AS(save_sessions({s}, dir.file("log.tsv")), DataError);
    s.session_id = "";
    CHECK_THROWS_AS(save_sessions({s}, dir.file("log.tsv")), DataError);
}

TEST_CASE("annotations load with majority-vote resolution") {
    TempDir dir;
    testutil::write_text(dir.file("ann.tsv"),
                         "# rater votes\n"
                         "q0\ta\t1\t2\n"
                         "q0\ta\t1\t2\n"
                         "q0\ta\t2\t3\n"
                         "\n"
                         "q0\tb\t2\t4\n"
                         "q1\ta\t0\t0\n");
    auto records = load_annotations(dir.file("ann.tsv"));
    REQUIRE(records.size() == 3);
    // Sorted by (query, image); (q0, a) resolves to the 2-vote label.
    CHECK(records[0].query_id == "q0");
    CHECK(records[0].image_id == "a");
    CHECK(records[0].topical == 1);
    CHECK(records[0].quality == 2);
    CHECK(records[1].image_id == "b");
    CHECK(records[2].query_id == "q1");

    // A frequency tie picks the larger (topical, quality) pair.
    testutil::write_text(dir.file("tie.tsv"),
                         "q0\ta\t1\t2\n"
                         "q0\ta\t2\t3\n");
    auto tie = load_annotations(dir.file("tie.tsv"));
    REQUIRE(tie.size() == 1);
    CHECK(tie[0].topical == 2);
    CHECK(tie[0].quality == 3);
}

TEST_CASE("annotation round trip and validation") {
    TempDir dir;
    std::vector<AnnotationRecord> records{{"q0", "a", 2, 4}, {"q0", "b", 0, 0}};
    save_annotations(records, dir.file("ann.tsv"));
    auto loaded = load_annotations(dir.file("ann.tsv"));
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].topical == 2);
    CHECK(loaded[0].quality == 4);

    testutil::write_text(dir.file("bad.tsv"), "q0\ta\t5\t0\n");
    CHECK_THROWS_AS(load_annotations(dir.file("bad.tsv")), DataError);
    testutil::write_text(dir.file("bad2.tsv"), "q0\ta\t1\n");
    CHECK_THROWS_AS(load_annotations(dir.file("bad2.tsv")), DataError);
}

TEST_CASE("splits are deterministic, stratified, and exhaustive") {
    std::vector<Session> sessions;
    for (int q = 0; q < 4; ++q)
        for (int i = 0; i < 10; ++i)
            sessions.push_back(make_session({2}, {}, "q" + std::to_string(q),
                                            "q" + std::to_string(q) + "_s" +
                                                std::to_string(i)));
    auto a = make_split(sessions, 7, 3, 42);
    auto b = make_split(sessions, 7, 3, 42);
    CHECK(a.train_ids == b.train_ids);
    CHECK(a.test_ids == b.test_ids);
    CHECK(a.train_ids.size() + a.test_ids.size() == sessions.size());

    // Per query: 10 sessions at 7:3 puts 7 in train.
    for (int q = 0; q < 4; ++q) {
        int train_count = 0;
        for (int i = 0; i < 10; ++i)
            train_count += a.train_ids.count("q" + std::to_string(q) + "_s" +
                                             std::to_string(i));
        CHECK(train_count == 7);
    }

    auto c = make_split(sessions, 7, 3, 43);
    CHECK(a.train_ids != c.train_ids);

    // Ids never land in both folds.
    for (const auto& id : a.train_ids) CHECK(a.test_ids.count(id) == 0);
}

TEST_CASE("tiny queries keep both folds usable") {
    std::vector<Session> sessions;
    sessions.push_back(make_session({2}, {}, "solo", "only"));
    sessions.push_back(make_session({2}, {}, "duo", "d0"));
    sessions.push_back(make_session({2}, {}, "duo", "d1"));
    auto split = make_split(sessions, 7, 3, 1);
    // A single-session query trains; a two-session query lands one per fold.
    CHECK(split.train_ids.count("only") == 1);
    CHECK(split.train_ids.count("d0") + split.train_ids.count("d1") == 1);
    CHECK(split.test_ids.count("d0") + split.test_ids.count("d1") == 1);
}

TEST_CASE("split manifests round-trip and apply") {
    std::vector<Session> sessions;
    for (int i = 0; i < 10; ++i)
        sessions.push_back(make_session({2}, {}, "q0", "s" + std::to_string(i)));
    auto split = make_split(sessions, 7, 3, 5);
    TempDir dir;
    save_split(split, dir.file("split.tsv"));
    auto loaded = load_split(dir.file("split.tsv"));
    CHECK(loaded.ratio_train == 7);
    CHECK(loaded.ratio_test == 3);
    CHECK(loaded.seed == 5);
    CHECK(loaded.train_ids == split.train_ids);
    CHECK(loaded.test_ids == split.test_ids);

    auto train = apply_fold(sessions, loaded, Fold::Train);
    auto test = apply_fold(sessions, loaded, Fold::Test);
    CHECK(train.size() == 7);
    CHECK(test.size() == 3);
    for (const auto& s : train) CHECK(loaded.train_ids.count(s.session_id) == 1);

    CHECK(fold_from_string("train") == Fold::Train);
    CHECK(fold_from_string("test") == Fold::Test);
    CHECK_THROWS_AS(fold_from_string("validation"), DataError);
    CHECK_THROWS_AS(make_split(sessions, 0, 3, 1), DataError);
}

TEST_CASE("duplicate session ids break the split") {
    std::vector<Session> sessions{make_session({2}, {}, "q0", "dup"),
                                  make_session({2}, {}, "q1", "dup")};
    CHECK_THROWS_AS(make_split(sessions, 7, 3, 1), DataError);
}
