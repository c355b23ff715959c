#include "vforge/bus.hpp"

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "vforge/error.hpp"

namespace vforge::bus {

namespace {

std::vector<std::string> split_levels(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find('/', start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join_levels(const std::vector<std::string>& segments) {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) out += '/';
    out += segments[i];
  }
  return out;
}

}  // namespace

Topic Topic::parse(std::string_view text) { return from_segments(split_levels(text)); }

Topic Topic::from_segments(std::vector<std::string> segments) {
  if (segments.empty()) fail("InvalidTopic", "topic has no segments");
  for (const auto& s : segments) {
    if (s.empty()) fail("InvalidTopic", "empty topic segment");
    if (s.find_first_of("/+#") != std::string::npos) {
      fail("InvalidTopic", "topic segment '" + s + "' contains '/', '+' or '#'");
    }
  }
  Topic t;
  t.segments_ = std::move(segments);
  return t;
}

std::string Topic::str() const { return join_levels(segments_); }

TopicFilter TopicFilter::parse(std::string_view text) {
  TopicFilter f;
  f.segments_ = split_levels(text);
  for (std::size_t i = 0; i < f.segments_.size(); ++i) {
    const auto& s = f.segments_[i];
    if (s == "+") continue;
    if (s == "#") {
      if (i + 1 != f.segments_.size()) fail("InvalidFilter", "'#' must be the last level");
      continue;
    }
    if (s.empty()) fail("InvalidFilter", "empty filter level");
    if (s.find_first_of("+#") != std::string::npos) {
      fail("InvalidFilter", "wildcard mixed into level '" + s + "'");
    }
  }
  return f;
}

std::string TopicFilter::str() const { return join_levels(segments_); }

bool topic_matches(const TopicFilter& filter, const Topic& topic) {
  const auto& f = filter.segments();
  const auto& t = topic.segments();
  std::size_t i = 0;
  for (; i < f.size(); ++i) {
    if (f[i] == "#") return true;
    if (i >= t.size()) return false;
    if (f[i] != "+" && f[i] != t[i]) return false;
  }
  return i == t.size();
}

namespace detail {

struct SubscriptionState {
  std::uint64_t id = 0;
  TopicFilter filter;
  Sink sink;
  std::deque<Message> queue;
  std::uint64_t dropped = 0;
  std::uint64_t delivered = 0;
  bool cancelled = false;
};

struct BusCore {
  explicit BusCore(BusOptions opts) : options(opts) {}

  BusOptions options;
  mutable std::mutex mu;
  std::condition_variable work_cv;
  std::condition_variable idle_cv;
  std::vector<std::shared_ptr<SubscriptionState>> subs;
  std::map<std::string, std::uint64_t, std::less<>> publisher_seq;
  std::uint64_t next_id = 1;
  std::size_t pending = 0;
  bool busy = false;
  bool closing = false;
  bool stopped = false;
  std::size_t cursor = 0;
  std::thread dispatcher;

  void run() {
    std::unique_lock lock(mu);
    while (true) {
      work_cv.wait(lock, [&] { return pending > 0 || closing; });
      if (pending == 0 && closing) break;

      // Round-robin so one busy subscription cannot starve the rest.
      std::shared_ptr<SubscriptionState> chosen;
      for (std::size_t k = 0; k < subs.size(); ++k) {
        auto& s = subs[(cursor + k) % subs.size()];
        if (!s->queue.empty()) {
          chosen = s;
          cursor = (cursor + k + 1) % subs.size();
          break;
        }
      }
      if (!chosen) {
        pending = 0;
        continue;
      }
      Message msg = std::move(chosen->queue.front());
      chosen->queue.pop_front();
      --pending;
      busy = true;
      lock.unlock();
      try {
        chosen->sink(msg);
      } catch (...) {
        // A faulty sink must not take down delivery for everyone else.
      }
      lock.lock();
      busy = false;
      if (!chosen->cancelled) ++chosen->delivered;
      if (pending == 0) idle_cv.notify_all();
    }
    stopped = true;
    idle_cv.notify_all();
  }

  void remove(const std::shared_ptr<SubscriptionState>& state) {
    std::lock_guard lock(mu);
    if (state->cancelled) return;
    state->cancelled = true;
    pending -= state->queue.size();
    state->queue.clear();
    std::erase(subs, state);
    if (!subs.empty()) cursor %= subs.size();
    if (pending == 0) idle_cv.notify_all();
  }
};

}  // namespace detail

void Subscription::cancel() {
  if (!state_) return;
  if (auto core = core_.lock()) {
    core->remove(state_);
  } else {
    state_->cancelled = true;
  }
}

bool Subscription::active() const {
  if (!state_) return false;
  auto core = core_.lock();
  if (!core) return false;
  std::lock_guard lock(core->mu);
  return !state_->cancelled;
}

std::uint64_t Subscription::dropped() const {
  if (!state_) return 0;
  auto core = core_.lock();
  if (!core) return state_->dropped;
  std::lock_guard lock(core->mu);
  return state_->dropped;
}

std::uint64_t Subscription::delivered() const {
  if (!state_) return 0;
  auto core = core_.lock();
  if (!core) return state_->delivered;
  std::lock_guard lock(core->mu);
  return state_->delivered;
}

std::string Subscription::filter() const { return state_ ? state_->filter.str() : ""; }

Bus::Bus(BusOptions options) : core_(std::make_shared<detail::BusCore>(options)) {
  if (core_->options.queue_capacity == 0) fail("InvalidOption", "queue capacity must be > 0");
  core_->dispatcher = std::thread([core = core_.get()] { core->run(); });
}

Bus::~Bus() { close(); }

Subscription Bus::subscribe(const TopicFilter& filter, Sink sink) {
  auto state = std::make_shared<detail::SubscriptionState>();
  state->filter = filter;
  state->sink = std::move(sink);
  {
    std::lock_guard lock(core_->mu);
    if (core_->closing) fail("BusClosed", "bus is closed");
    state->id = core_->next_id++;
    core_->subs.push_back(state);
  }
  return Subscription(core_, std::move(state));
}

std::size_t Bus::publish(const Topic& topic, std::string payload, std::string_view publisher) {
  std::size_t count = 0;
  {
    std::lock_guard lock(core_->mu);
    if (core_->closing) fail("BusClosed", "bus is closed");
    auto it = core_->publisher_seq.find(publisher);
    if (it == core_->publisher_seq.end()) {
      it = core_->publisher_seq.emplace(std::string(publisher), 0).first;
    }
    const std::uint64_t seq = ++it->second;
    for (auto& s : core_->subs) {
      if (!topic_matches(s->filter, topic)) continue;
      if (s->queue.size() >= core_->options.queue_capacity) {
        s->queue.pop_front();
        ++s->dropped;
        --core_->pending;
      }
      s->queue.push_back(Message{topic, payload, std::string(publisher), seq});
      ++core_->pending;
      ++count;
    }
  }
  if (count) core_->work_cv.notify_one();
  return count;
}

void Bus::flush() {
  std::unique_lock lock(core_->mu);
  core_->idle_cv.wait(lock, [&] {
    return core_->stopped || (core_->pending == 0 && !core_->busy);
  });
}

void Bus::close() {
  {
    std::lock_guard lock(core_->mu);
    core_->closing = true;
  }
  core_->work_cv.notify_all();
  if (core_->dispatcher.joinable() && core_->dispatcher.get_id() != std::this_thread::get_id()) {
    core_->dispatcher.join();
  }
}

bool Bus::closed() const {
  std::lock_guard lock(core_->mu);
  return core_->closing;
}

std::size_t Bus::live_subscriptions() const {
  std::lock_guard lock(core_->mu);
  return core_->subs.size();
}

}  // namespace vforge::bus
