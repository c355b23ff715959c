#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "vforge/bus.hpp"

namespace vforge::bus::mqtt {

// MQTT 3.1.1 control packet types (high nibble of the fixed header).
enum class PacketType : std::uint8_t {
  Connect = 1,
  Connack = 2,
  Publish = 3,
  Subscribe = 8,
  Suback = 9,
  Pingreq = 12,
  Pingresp = 13,
  Disconnect = 14,
};

struct BrokerUri {
  std::string host;
  std::uint16_t port = 1883;
};

/// Accepts `mqtt://host[:port]` or `tcp://host[:port]`.
BrokerUri parse_broker_uri(std::string_view uri);

std::string encode_remaining_length(std::size_t length);
std::string encode_connect(std::string_view client_id, std::uint16_t keep_alive_s);
std::string encode_publish(std::string_view topic, std::string_view payload);
std::string encode_subscribe(std::uint16_t packet_id, std::string_view filter);
std::string encode_disconnect();

struct Packet {
  PacketType type{};
  std::uint8_t flags = 0;
  std::string body;
};

/// Incremental decoder for a byte stream of MQTT packets.
class PacketReader {
public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  std::optional<Packet> next();

private:
  std::string buffer_;
};

struct PublishView {
  std::string topic;
  std::string payload;
};

/// QoS 0 publish packets only.
PublishView decode_publish(const Packet& packet);

/// Mirrors bus traffic onto an external broker and injects broker traffic
/// into the bus. Messages that entered through the bridge are not echoed back.
class Bridge {
public:
  struct Options {
    std::string outbound_filter = "#";
    std::string inbound_filter = "vforge/in/#";
    std::string inbound_strip_prefix = "vforge/in/";
    std::string client_id = "vforge-bridge";
  };

  static constexpr std::string_view kPublisher = "mqtt-bridge";

  Bridge(Bus& bus, const BrokerUri& uri, Options options);
  ~Bridge();

  Bridge(const Bridge&) = delete;
  Bridge& operator=(const Bridge&) = delete;

  /// Reads VFORGE_MQTT_BRIDGE; returns nullptr when unset or empty.
  static std::unique_ptr<Bridge> from_env(Bus& bus);

  std::uint64_t forwarded() const noexcept { return forwarded_; }
  std::uint64_t received() const noexcept { return received_; }

private:
  void send(const std::string& bytes);
  void read_loop();

  Bus& bus_;
  Options options_;
  int fd_ = -1;
  std::mutex write_mu_;
  std::atomic<bool> running_{true};
  std::atomic<std::uint64_t> forwarded_{0};
  std::atomic<std::uint64_t> received_{0};
  Subscription outbound_;
  std::thread reader_;
};

}  // namespace vforge::bus::mqtt
