#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace vforge::bus {

/// Concrete topic: non-empty segments joined by '/', no wildcards.
class Topic {
public:
  static Topic parse(std::string_view text);
  static Topic from_segments(std::vector<std::string> segments);

  const std::vector<std::string>& segments() const noexcept { return segments_; }
  std::string str() const;

  friend bool operator==(const Topic&, const Topic&) = default;

private:
  std::vector<std::string> segments_;
};

/// MQTT-style filter: literal segments, '+' for one level, trailing '#' for any suffix.
class TopicFilter {
public:
  static TopicFilter parse(std::string_view text);

  const std::vector<std::string>& segments() const noexcept { return segments_; }
  std::string str() const;

private:
  std::vector<std::string> segments_;
};

bool topic_matches(const TopicFilter& filter, const Topic& topic);

struct Message {
  Topic topic;
  std::string payload;
  std::string publisher;
  std::uint64_t seq = 0;  // strictly increasing per publisher
};

using Sink = std::function<void(const Message&)>;

struct BusOptions {
  std::size_t queue_capacity = 1024;
};

namespace detail {
struct BusCore;
struct SubscriptionState;
}  // namespace detail

/// Handle returned by Bus::subscribe. Copies share the same subscription.
class Subscription {
public:
  Subscription() = default;

  void cancel();
  bool active() const;
  std::uint64_t dropped() const;
  std::uint64_t delivered() const;
  std::string filter() const;

private:
  friend class Bus;
  Subscription(std::shared_ptr<detail::BusCore> core,
               std::shared_ptr<detail::SubscriptionState> state)
      : core_(std::move(core)), state_(std::move(state)) {}

  std::weak_ptr<detail::BusCore> core_;
  std::shared_ptr<detail::SubscriptionState> state_;
};

/// In-process publish/subscribe with at-most-once delivery.
///
/// publish() never blocks on consumers: messages land in a bounded queue per
/// subscription (oldest dropped on overflow) and a single dispatcher thread
/// invokes sinks, so no sink is ever called concurrently. Sinks may publish
/// but must not call flush() or close().
class Bus {
public:
  explicit Bus(BusOptions options = {});
  ~Bus();

  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  Subscription subscribe(const TopicFilter& filter, Sink sink);
  /// Returns the number of live subscriptions the message was queued for.
  std::size_t publish(const Topic& topic, std::string payload,
                      std::string_view publisher = "");

  /// Blocks until every queued message has been handed to its sink.
  void flush();
  /// Rejects further publish/subscribe (BusClosed), drains queues, stops dispatch.
  void close();
  bool closed() const;
  std::size_t live_subscriptions() const;

private:
  std::shared_ptr<detail::BusCore> core_;
};

}  // namespace vforge::bus
