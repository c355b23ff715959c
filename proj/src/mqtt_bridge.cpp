#include "vforge/mqtt_bridge.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>

#include "vforge/error.hpp"

namespace vforge::bus::mqtt {

namespace {

void append_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v & 0xff));
}

void append_str(std::string& out, std::string_view s) {
  if (s.size() > 0xffff) fail("MqttEncode", "string too long for MQTT");
  append_u16(out, static_cast<std::uint16_t>(s.size()));
  out.append(s);
}

std::string frame(PacketType type, std::uint8_t flags, const std::string& body) {
  std::string out;
  out.push_back(static_cast<char>((static_cast<std::uint8_t>(type) << 4) | flags));
  out += encode_remaining_length(body.size());
  out += body;
  return out;
}

void write_all(int fd, const std::string& bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    auto n = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n <= 0) fail("BridgeIo", "send to broker failed");
    off += static_cast<std::size_t>(n);
  }
}

}  // namespace

BrokerUri parse_broker_uri(std::string_view uri) {
  std::string_view rest;
  for (std::string_view scheme : {"mqtt://", "tcp://"}) {
    if (uri.substr(0, scheme.size()) == scheme) rest = uri.substr(scheme.size());
  }
  if (rest.empty()) fail("InvalidBridgeUri", "expected mqtt://host[:port], got '" + std::string(uri) + "'");
  if (auto slash = rest.find('/'); slash != std::string_view::npos) rest = rest.substr(0, slash);
  BrokerUri out;
  auto colon = rest.rfind(':');
  if (colon == std::string_view::npos) {
    out.host = std::string(rest);
  } else {
    out.host = std::string(rest.substr(0, colon));
    auto port = std::string(rest.substr(colon + 1));
    char* end = nullptr;
    long p = std::strtol(port.c_str(), &end, 10);
    if (port.empty() || *end != '\0' || p <= 0 || p > 65535) {
      fail("InvalidBridgeUri", "bad port '" + port + "'");
    }
    out.port = static_cast<std::uint16_t>(p);
  }
  if (out.host.empty()) fail("InvalidBridgeUri", "missing host");
  return out;
}

std::string encode_remaining_length(std::size_t length) {
  if (length > 268'435'455) fail("MqttEncode", "packet too large");
  std::string out;
  do {
    std::uint8_t byte = length % 128;
    length /= 128;
    if (length > 0) byte |= 0x80;
    out.push_back(static_cast<char>(byte));
  } while (length > 0);
  return out;
}

std::string encode_connect(std::string_view client_id, std::uint16_t keep_alive_s) {
  std::string body;
  append_str(body, "MQTT");
  body.push_back(4);     // protocol level 3.1.1
  body.push_back(0x02);  // clean session
  append_u16(body, keep_alive_s);
  append_str(body, client_id);
  return frame(PacketType::Connect, 0, body);
}

std::string encode_publish(std::string_view topic, std::string_view payload) {
  std::string body;
  append_str(body, topic);
  body.append(payload);
  return frame(PacketType::Publish, 0, body);
}

std::string encode_subscribe(std::uint16_t packet_id, std::string_view filter) {
  std::string body;
  append_u16(body, packet_id);
  append_str(body, filter);
  body.push_back(0);  // requested QoS 0
  return frame(PacketType::Subscribe, 0x02, body);
}

std::string encode_disconnect() { return frame(PacketType::Disconnect, 0, {}); }

std::optional<Packet> PacketReader::next() {
  if (buffer_.size() < 2) return std::nullopt;
  std::size_t length = 0;
  std::size_t multiplier = 1;
  std::size_t pos = 1;
  while (true) {
    if (pos >= buffer_.size()) return std::nullopt;
    auto byte = static_cast<std::uint8_t>(buffer_[pos++]);
    length += (byte & 0x7f) * multiplier;
    if (!(byte & 0x80)) break;
    multiplier *= 128;
    if (pos > 4) fail("MqttDecode", "malformed remaining length");
  }
  if (buffer_.size() < pos + length) return std::nullopt;
  Packet p;
  auto header = static_cast<std::uint8_t>(buffer_[0]);
  p.type = static_cast<PacketType>(header >> 4);
  p.flags = header & 0x0f;
  p.body = buffer_.substr(pos, length);
  buffer_.erase(0, pos + length);
  return p;
}

PublishView decode_publish(const Packet& packet) {
  if (packet.type != PacketType::Publish) fail("MqttDecode", "not a PUBLISH packet");
  if ((packet.flags & 0x06) != 0) fail("MqttDecode", "only QoS 0 publish is supported");
  if (packet.body.size() < 2) fail("MqttDecode", "truncated PUBLISH");
  std::size_t len = (static_cast<std::uint8_t>(packet.body[0]) << 8) |
                    static_cast<std::uint8_t>(packet.body[1]);
  if (packet.body.size() < 2 + len) fail("MqttDecode", "truncated PUBLISH topic");
  return {packet.body.substr(2, len), packet.body.substr(2 + len)};
}

Bridge::Bridge(Bus& bus, const BrokerUri& uri, Options options)
    : bus_(bus), options_(std::move(options)) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  auto port = std::to_string(uri.port);
  if (::getaddrinfo(uri.host.c_str(), port.c_str(), &hints, &res) != 0) {
    fail("BridgeConnect", "cannot resolve " + uri.host);
  }
  for (auto* ai = res; ai; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) fail("BridgeConnect", "cannot connect to " + uri.host + ":" + port);

  // Handshake synchronously so a refused CONNECT surfaces as an error here.
  write_all(fd_, encode_connect(options_.client_id, 60));
  PacketReader reader;
  std::optional<Packet> ack;
  char buf[256];
  while (!ack) {
    auto n = ::recv(fd_, buf, sizeof buf, 0);
    if (n <= 0) {
      ::close(fd_);
      fail("BridgeConnect", "broker closed connection during CONNECT");
    }
    reader.feed({buf, static_cast<std::size_t>(n)});
    ack = reader.next();
  }
  if (ack->type != PacketType::Connack || ack->body.size() < 2 || ack->body[1] != 0) {
    ::close(fd_);
    fail("BridgeConnect", "broker refused CONNECT");
  }

  if (!options_.inbound_filter.empty()) send(encode_subscribe(1, options_.inbound_filter));
  reader_ = std::thread([this] { read_loop(); });

  outbound_ = bus_.subscribe(TopicFilter::parse(options_.outbound_filter),
                             [this](const Message& m) {
                               if (m.publisher == kPublisher) return;
                               try {
                                 send(encode_publish(m.topic.str(), m.payload));
                                 ++forwarded_;
                               } catch (const Error&) {
                                 // at-most-once: a dead broker link loses the message
                               }
                             });
}

Bridge::~Bridge() {
  outbound_.cancel();
  running_ = false;
  try {
    send(encode_disconnect());
  } catch (const Error&) {
  }
  ::shutdown(fd_, SHUT_RDWR);
  if (reader_.joinable()) reader_.join();
  ::close(fd_);
}

std::unique_ptr<Bridge> Bridge::from_env(Bus& bus) {
  const char* uri = std::getenv("VFORGE_MQTT_BRIDGE");
  if (!uri || !*uri) return nullptr;
  return std::make_unique<Bridge>(bus, parse_broker_uri(uri), Options{});
}

void Bridge::send(const std::string& bytes) {
  std::lock_guard lock(write_mu_);
  write_all(fd_, bytes);
}

void Bridge::read_loop() {
  PacketReader reader;
  char buf[4096];
  while (running_) {
    auto n = ::recv(fd_, buf, sizeof buf, 0);
    if (n <= 0) break;
    reader.feed({buf, static_cast<std::size_t>(n)});
    try {
      while (auto p = reader.next()) {
        if (p->type != PacketType::Publish) continue;
        auto view = decode_publish(*p);
        std::string topic = view.topic;
        const auto& prefix = options_.inbound_strip_prefix;
        if (!prefix.empty() && topic.compare(0, prefix.size(), prefix) == 0) {
          topic.erase(0, prefix.size());
        }
        bus_.publish(Topic::parse(topic), std::move(view.payload), kPublisher);
        ++received_;
      }
    } catch (const Error&) {
      // Bad inbound topic or packet; skip it and keep the link.
    }
  }
}

}  // namespace vforge::bus::mqtt
