#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <random>
#include <thread>

#include "doctest.h"
#include "support.hpp"
#include "vforge/bus.hpp"
#include "vforge/error.hpp"

using namespace vforge;
using namespace vforge::bus;

namespace {

std::string join(const std::vector<std::string>& segs) {
  std::string out;
  for (std::size_t i = 0; i < segs.size(); ++i) out += (i ? "/" : "") + segs[i];
  return out;
}

bool throws_code(auto&& fn, const std::string& code) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("topic_matches on the stated examples") {
  CHECK(topic_matches(TopicFilter::parse("TV/+/+/data_out"), Topic::parse("TV/tv1/vt1/data_out")));
  CHECK(topic_matches(TopicFilter::parse("#"), Topic::parse("a/b/c")));
  CHECK(topic_matches(TopicFilter::parse("a/#"), Topic::parse("a")));
  CHECK_FALSE(topic_matches(TopicFilter::parse("a/+"), Topic::parse("a")));
  CHECK_FALSE(topic_matches(TopicFilter::parse("a/b"), Topic::parse("a/b/c")));
}

TEST_CASE("topic_matches agrees with the recursive oracle") {
  std::mt19937_64 rng(42);
  int disagreements = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto f = test::random_filter_segments(rng);
    const auto t = test::random_topic_segments(rng);
    const bool expected = test::oracle_topic_matches(f, 0, t, 0);
    if (topic_matches(TopicFilter::parse(join(f)), Topic::parse(join(t))) != expected) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("topic and filter grammar") {
  CHECK(Topic::parse("a/b").segments().size() == 2);
  CHECK_THROWS_AS(Topic::parse("a//b"), Error);
  CHECK_THROWS_AS(Topic::parse("a/+"), Error);
  CHECK_THROWS_AS(Topic::parse("a/#"), Error);
  CHECK_THROWS_AS(Topic::parse(""), Error);
  CHECK_THROWS_AS(TopicFilter::parse("a/#/b"), Error);
  CHECK_THROWS_AS(TopicFilter::parse("a/b+"), Error);
  CHECK(TopicFilter::parse("a/+/#").str() == "a/+/#");
}

TEST_CASE("subscribe then publish delivers exactly once") {
  Bus bus;
  std::atomic<int> got{0};
  auto sub = bus.subscribe(TopicFilter::parse("a/+"), [&](const Message&) { ++got; });
  CHECK(bus.publish(Topic::parse("a/b"), "x") == 1);
  bus.flush();
  CHECK(got == 1);
  CHECK(sub.delivered() == 1);
}

TEST_CASE("cancelled subscription receives nothing") {
  Bus bus;
  std::atomic<int> got{0};
  auto sub = bus.subscribe(TopicFilter::parse("#"), [&](const Message&) { ++got; });
  sub.cancel();
  CHECK_FALSE(sub.active());
  CHECK(bus.publish(Topic::parse("a"), "x") == 0);
  bus.flush();
  CHECK(got == 0);
}

TEST_CASE("overlapping filters deliver once per subscription") {
  Bus bus;
  std::atomic<int> got{0};
  auto sink = [&](const Message&) { ++got; };
  auto s1 = bus.subscribe(TopicFilter::parse("a/#"), sink);
  auto s2 = bus.subscribe(TopicFilter::parse("a/b"), sink);
  CHECK(bus.publish(Topic::parse("a/b"), "x") == 2);
  bus.flush();
  CHECK(got == 2);
}

TEST_CASE("delivered count equals matching subscriptions") {
  Bus bus;
  CHECK(bus.publish(Topic::parse("a"), "x") == 0);
  auto s1 = bus.subscribe(TopicFilter::parse("a"), [](const Message&) {});
  auto s2 = bus.subscribe(TopicFilter::parse("b"), [](const Message&) {});
  CHECK(bus.publish(Topic::parse("a"), "x") == 1);

  std::mt19937_64 rng(3);
  std::vector<std::vector<std::string>> filters;
  std::vector<Subscription> subs;
  for (int i = 0; i < 20; ++i) {
    filters.push_back(test::random_filter_segments(rng));
    subs.push_back(bus.subscribe(TopicFilter::parse(join(filters.back())), [](const Message&) {}));
  }
  for (int i = 0; i < 200; ++i) {
    const auto t = test::random_topic_segments(rng);
    std::size_t expected = join(t) == "a" ? 1 : (join(t) == "b" ? 1 : 0);
    for (const auto& f : filters) expected += test::oracle_topic_matches(f, 0, t, 0) ? 1 : 0;
    CHECK(bus.publish(Topic::parse(join(t)), "p") == expected);
  }
  bus.flush();
}

TEST_CASE("sequential publishes arrive in order with increasing seq") {
  Bus bus;
  std::vector<std::string> payloads;
  std::vector<std::uint64_t> seqs;
  auto sub = bus.subscribe(TopicFilter::parse("n"), [&](const Message& m) {
    payloads.push_back(m.payload);
    seqs.push_back(m.seq);
  });
  for (int i = 1; i <= 100; ++i) bus.publish(Topic::parse("n"), std::to_string(i), "p1");
  bus.flush();
  REQUIRE(payloads.size() == 100);
  for (int i = 0; i < 100; ++i) CHECK(payloads[static_cast<std::size_t>(i)] == std::to_string(i + 1));
  for (std::size_t i = 1; i < seqs.size(); ++i) CHECK(seqs[i] > seqs[i - 1]);
}

TEST_CASE("concurrent publishers keep per-publisher FIFO and serial sinks") {
  Bus bus;
  std::mutex mu;
  std::map<std::string, std::vector<int>> seen;
  std::atomic<int> in_sink{0};
  std::atomic<bool> overlap{false};
  auto sub = bus.subscribe(TopicFilter::parse("c/#"), [&](const Message& m) {
    if (in_sink.fetch_add(1) != 0) overlap = true;
    {
      std::lock_guard lock(mu);
      seen[m.publisher].push_back(std::stoi(m.payload));
    }
    in_sink.fetch_sub(1);
  });
  std::vector<std::thread> threads;
  for (int p = 0; p < 4; ++p) {
    threads.emplace_back([&bus, p] {
      for (int i = 0; i < 200; ++i) bus.publish(Topic::parse("c/" + std::to_string(p)), std::to_string(i), "pub" + std::to_string(p));
    });
  }
  for (auto& t : threads) t.join();
  bus.flush();
  CHECK_FALSE(overlap);
  std::size_t total = 0;
  for (const auto& [pub, values] : seen) {
    total += values.size();
    for (std::size_t i = 1; i < values.size(); ++i) CHECK(values[i] > values[i - 1]);
  }
  CHECK(total + sub.dropped() == 800);
}

TEST_CASE("overflow drops the oldest messages") {
  Bus bus(BusOptions{4});
  std::mutex gate;
  std::unique_lock hold(gate);
  std::vector<std::string> got;
  std::atomic<bool> entered{false};
  auto sub = bus.subscribe(TopicFilter::parse("q"), [&](const Message& m) {
    entered = true;
    std::lock_guard wait(gate);
    got.push_back(m.payload);
  });
  bus.publish(Topic::parse("q"), "0");
  while (!entered) std::this_thread::yield();
  for (int i = 1; i <= 10; ++i) bus.publish(Topic::parse("q"), std::to_string(i));
  hold.unlock();
  bus.flush();
  CHECK(sub.dropped() == 6);
  REQUIRE(got.size() == 5);
  CHECK(got[0] == "0");
  CHECK(got[1] == "7");
  CHECK(got[4] == "10");
}

TEST_CASE("closed bus rejects publish and subscribe") {
  Bus bus;
  bus.close();
  CHECK(bus.closed());
  CHECK(throws_code([&] { bus.publish(Topic::parse("a"), "x"); }, "BusClosed"));
  CHECK(throws_code([&] { bus.subscribe(TopicFilter::parse("a"), [](const Message&) {}); }, "BusClosed"));
}

TEST_CASE("sinks may publish") {
  Bus bus;
  std::atomic<int> second{0};
  auto s2 = bus.subscribe(TopicFilter::parse("out"), [&](const Message&) { ++second; });
  auto s1 = bus.subscribe(TopicFilter::parse("in"), [&](const Message& m) { bus.publish(Topic::parse("out"), m.payload); });
  bus.publish(Topic::parse("in"), "x");
  bus.flush();
  bus.flush();
  CHECK(second == 1);
}
