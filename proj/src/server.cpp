#include "simbench/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "simbench/errors.hpp"
#include "simbench/protocol.hpp"
#include "simbench/scope.hpp"
#include "simbench/simulation.hpp"

namespace simbench {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxLine = 4096;

const char* kStubPage =
    "<!doctype html><html><head><title>simbench</title></head><body>"
    "<p>Dashboard files are not installed. Point <code>net.www_dir</code> at the built "
    "dashboard. The line protocol is available on <code>/ws</code>.</p></body></html>\n";

std::string mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

/// One connected protocol client, living on the I/O thread.
class Client : public std::enable_shared_from_this<Client> {
 public:
  using Submit = std::function<void(std::shared_ptr<Client>, std::string)>;

  explicit Client(std::size_t max_pending) : max_pending_(max_pending) {}
  virtual ~Client() = default;

  // Both are called on the I/O thread.
  void deliver_reply(std::string line) {
    awaiting_reply_ = false;
    enqueue(std::make_shared<const std::string>(std::move(line)), false);
    pump_lines();
    if (wants_more_input()) read_more();
  }

  void deliver_frame(const std::shared_ptr<const std::string>& frame) {
    if (pending_frames_ >= max_pending_) return;
    enqueue(frame, true);
  }

 protected:
  virtual void read_more() = 0;

  /// Hands the next buffered line to the simulation, one at a time.
  void pump_lines() {
    if (awaiting_reply_ || lines_.empty() || closed_) return;
    awaiting_reply_ = true;
    std::string line = std::move(lines_.front());
    lines_.pop_front();
    submit_(shared_from_this(), std::move(line));
  }

  void push_line(std::string line) {
    lines_.push_back(std::move(line));
    pump_lines();
  }

  bool wants_more_input() const { return !awaiting_reply_ && lines_.empty() && !closed_; }

  virtual void write_front() = 0;

  void on_written() {
    if (outbox_.front().second) --pending_frames_;
    outbox_.pop_front();
    writing_ = false;
    if (!outbox_.empty() && !closed_) {
      writing_ = true;
      write_front();
    }
  }

  void enqueue(std::shared_ptr<const std::string> text, bool is_frame) {
    if (closed_) return;
    if (is_frame) ++pending_frames_;
    outbox_.emplace_back(std::move(text), is_frame);
    if (!writing_) {
      writing_ = true;
      write_front();
    }
  }

  Submit submit_;
  std::deque<std::pair<std::shared_ptr<const std::string>, bool>> outbox_;
  std::deque<std::string> lines_;
  bool closed_ = false;

 private:
  std::size_t max_pending_;
  std::size_t pending_frames_ = 0;
  bool writing_ = false;
  bool awaiting_reply_ = false;
};

class StreamClient final : public Client {
 public:
  StreamClient(tcp::socket socket, std::size_t max_pending, Submit submit)
      : Client(max_pending), socket_(std::move(socket)), buffer_(kMaxLine) {
    submit_ = std::move(submit);
  }

  void start() { read_more(); }

 private:
  void read_more() override {
    asio::async_read_until(socket_, buffer_, '\n',
                           [self = std::static_pointer_cast<StreamClient>(shared_from_this())](
                               beast::error_code ec, std::size_t n) { self->on_read(ec, n); });
  }

  void on_read(beast::error_code ec, std::size_t n) {
    if (ec) {
      close();
      return;
    }
    std::string line(asio::buffers_begin(buffer_.data()), asio::buffers_begin(buffer_.data()) + n);
    buffer_.consume(n);
    push_line(std::move(line));
    if (wants_more_input()) read_more();
  }

  void write_front() override {
    asio::async_write(socket_, asio::buffer(*outbox_.front().first),
                      [self = std::static_pointer_cast<StreamClient>(shared_from_this())](
                          beast::error_code ec, std::size_t) {
                        if (ec) {
                          self->close();
                          return;
                        }
                        self->on_written();
                      });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ignored;
    socket_.shutdown(tcp::socket::shutdown_both, ignored);
    socket_.close(ignored);
  }

  tcp::socket socket_;
  asio::streambuf buffer_;
};

class WsClient final : public Client {
 public:
  WsClient(tcp::socket socket, std::size_t max_pending, Submit submit)
      : Client(max_pending), ws_(std::move(socket)) {
    submit_ = std::move(submit);
  }

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxLine);
    ws_.async_accept(req, [self = std::static_pointer_cast<WsClient>(shared_from_this())](
                              beast::error_code ec) {
      if (ec) return;
      self->read_more();
    });
  }

 private:
  void read_more() override {
    if (reading_) return;
    reading_ = true;
    ws_.async_read(buffer_, [self = std::static_pointer_cast<WsClient>(shared_from_this())](
                                beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    reading_ = false;
    if (ec) {
      closed_ = true;
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    // A message carries one or more '\n'-terminated lines; an unterminated
    // tail counts as a line of its own.
    std::size_t start = 0;
    while (start < text.size()) {
      const auto nl = text.find('\n', start);
      if (nl == std::string::npos) {
        push_line(text.substr(start) + "\n");
        break;
      }
      push_line(text.substr(start, nl - start + 1));
      start = nl + 1;
    }
    if (text.empty()) push_line("\n");
    if (wants_more_input()) read_more();
  }

  void write_front() override {
    ws_.text(true);
    ws_.async_write(asio::buffer(*outbox_.front().first),
                    [self = std::static_pointer_cast<WsClient>(shared_from_this())](
                        beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->closed_ = true;
                        return;
                      }
                      self->on_written();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  bool reading_ = false;
};

}  // namespace

struct BenchServer::Impl {
  // Holds the client alive until its reply has been handed back.
  struct Request {
    std::shared_ptr<Client> client;
    std::string line;
  };

  SimConfig cfg;
  ServeOptions opts;

  asio::io_context ioc;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  tcp::acceptor stream_acceptor{ioc};
  tcp::acceptor http_acceptor{ioc};
  std::uint16_t bound_stream_port = 0;
  std::uint16_t bound_http_port = 0;
  std::thread io_thread;
  std::thread sim_thread;

  std::mutex queue_mutex;
  std::deque<Request> queue;
  std::atomic<bool> running{false};
  bool started = false;
  bool stopped = false;

  // Owned by the stepping thread.
  std::vector<std::weak_ptr<Client>> subscribers;
  std::optional<ScopeRecorder> scope;

  Impl(SimConfig c, ServeOptions o) : cfg(std::move(c)), opts(std::move(o)) {
    cfg.sync();
    cfg.validate();
  }

  void submit(std::shared_ptr<Client> client, std::string line) {
    std::lock_guard lock(queue_mutex);
    queue.push_back(Request{client, std::move(line)});
  }

  Client::Submit submitter() {
    return [this](std::shared_ptr<Client> c, std::string line) { submit(std::move(c), std::move(line)); };
  }

  void bind(tcp::acceptor& acceptor, int port) {
    try {
      const tcp::endpoint ep(asio::ip::address_v4::any(), static_cast<std::uint16_t>(port));
      acceptor.open(ep.protocol());
      acceptor.set_option(asio::socket_base::reuse_address(true));
      acceptor.bind(ep);
      acceptor.listen();
    } catch (const boost::system::system_error& e) {
      throw PortInUse("cannot listen on port " + std::to_string(port) + ": " + e.what());
    }
  }

  void accept_stream() {
    stream_acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto client = std::make_shared<StreamClient>(std::move(socket), cfg.net.max_pending, submitter());
      client->start();
      accept_stream();
    });
  }

  void accept_http() {
    http_acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      serve_http(std::make_shared<beast::tcp_stream>(std::move(socket)));
      accept_http();
    });
  }

  void serve_http(std::shared_ptr<beast::tcp_stream> stream) {
    auto buffer = std::make_shared<beast::flat_buffer>();
    auto req = std::make_shared<http::request<http::string_body>>();
    stream->expires_after(std::chrono::seconds(30));
    http::async_read(*stream, *buffer, *req, [this, stream, buffer, req](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (websocket::is_upgrade(*req)) {
        if (req->target() != "/ws") {
          respond(stream, *req, http::status::not_found, "text/plain", "no such endpoint\n");
          return;
        }
        stream->expires_never();
        auto client = std::make_shared<WsClient>(stream->release_socket(), cfg.net.max_pending, submitter());
        client->start(std::move(*req));
        return;
      }
      handle_static(stream, *req);
    });
  }

  void handle_static(const std::shared_ptr<beast::tcp_stream>& stream,
                     const http::request<http::string_body>& req) {
    if (req.method() != http::verb::get && req.method() != http::verb::head) {
      respond(stream, req, http::status::method_not_allowed, "text/plain", "GET only\n");
      return;
    }
    std::string target(req.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target.front() != '/' || target.find("..") != std::string::npos) {
      respond(stream, req, http::status::bad_request, "text/plain", "bad path\n");
      return;
    }
    if (target == "/") target = "/index.html";

    if (!cfg.net.www_dir.empty()) {
      const std::filesystem::path file = std::filesystem::path(cfg.net.www_dir) / target.substr(1);
      std::ifstream in(file, std::ios::binary);
      if (in) {
        std::ostringstream body;
        body << in.rdbuf();
        respond(stream, req, http::status::ok, mime_type(file), body.str());
        return;
      }
    }
    if (target == "/index.html") {
      respond(stream, req, http::status::ok, "text/html", kStubPage);
      return;
    }
    respond(stream, req, http::status::not_found, "text/plain", "not found\n");
  }

  void respond(const std::shared_ptr<beast::tcp_stream>& stream,
               const http::request<http::string_body>& req, http::status status,
               const std::string& type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req.version());
    res->set(http::field::server, "simbench");
    res->set(http::field::content_type, type);
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(*stream, *res, [stream, res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      stream->socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  // Stepping thread.

  std::string handle(Simulation& sim, const Request& req) {
    Command cmd;
    try {
      cmd = proto::parse_command(req.line);
    } catch (const ProtocolError& e) {
      return proto::error_reply(e);
    }
    if (const auto* stream = std::get_if<proto::Stream>(&cmd)) {
      const auto& client = req.client;
      std::erase_if(subscribers, [&](const std::weak_ptr<Client>& w) {
        auto c = w.lock();
        return !c || c == client;
      });
      if (stream->on && client) subscribers.push_back(client);
      return "OK\n";
    }
    try {
      return sim.execute(cmd);
    } catch (const ProtocolError& e) {
      return proto::error_reply(e);
    }
  }

  void reply(const Request& req, std::string line) {
    asio::post(ioc, [client = req.client, line = std::move(line)]() mutable {
      client->deliver_reply(std::move(line));
    });
  }

  void publish(const std::string& frame_text) {
    if (subscribers.empty()) return;
    auto frame = std::make_shared<const std::string>(frame_text);
    std::erase_if(subscribers, [](const std::weak_ptr<Client>& w) { return w.expired(); });
    for (const auto& w : subscribers) {
      if (auto c = w.lock()) {
        asio::post(ioc, [c, frame] { c->deliver_frame(frame); });
      }
    }
  }

  void run_simulation() {
    Simulation sim(cfg);
    using clock = std::chrono::steady_clock;
    const double dt = sim.config().dt_plant;
    const double factor = sim.config().realtime_factor;
    auto origin = clock::now();
    std::uint64_t origin_step = 0;
    const auto max_catch_up = static_cast<std::uint64_t>(std::ceil(0.25 / dt));

    while (running.load()) {
      std::deque<Request> batch;
      {
        std::lock_guard lock(queue_mutex);
        batch.swap(queue);
      }
      for (const auto& req : batch) reply(req, handle(sim, req));

      const double elapsed = std::chrono::duration<double>(clock::now() - origin).count();
      auto target = origin_step + static_cast<std::uint64_t>(elapsed * factor / dt);
      if (target > sim.step_index() + max_catch_up) {
        // Too far behind the wall clock: drop the backlog.
        origin = clock::now();
        origin_step = sim.step_index() + max_catch_up;
        target = origin_step;
      }
      while (sim.step_index() < target) {
        sim.prepare();
        if (scope) scope->on_step(sim.step_index(), sim.time(), sim.probe());
        if (sim.frame_due()) publish(proto::format_telemetry(sim.telemetry()));
        sim.integrate();
      }
      std::this_thread::sleep_for(std::chrono::microseconds(500));
    }
  }

  void flush_scope() {
    if (!scope || opts.out_dir.empty()) return;
    const Trace trace = scope->trace();
    if (trace.rows() == 0) return;
    std::filesystem::create_directories(opts.out_dir);
    scope_export_csv(trace, std::filesystem::path(opts.out_dir) / "serve_analog.csv");
  }
};

BenchServer::BenchServer(SimConfig cfg, ServeOptions opts)
    : impl_(std::make_unique<Impl>(std::move(cfg), std::move(opts))) {}

BenchServer::~BenchServer() {
  try {
    stop();
  } catch (...) {
  }
}

void BenchServer::start() {
  auto& d = *impl_;
  if (d.started) return;
  d.bind(d.stream_acceptor, d.cfg.net.port);
  d.bind(d.http_acceptor, d.cfg.net.http_port);
  d.bound_stream_port = d.stream_acceptor.local_endpoint().port();
  d.bound_http_port = d.http_acceptor.local_endpoint().port();

  if (!d.opts.out_dir.empty()) {
    TraceConfig tc;
    for (Signal s : all_signals()) {
      if (!is_logic(s) || s == Signal::Pressed5v) tc.signals.emplace_back(signal_name(s));
    }
    tc.sample_hz = d.cfg.scope.analog_hz;
    tc.duration = d.cfg.scope.serve_window;
    const auto rows = static_cast<std::size_t>(d.cfg.scope.serve_window * d.cfg.scope.analog_hz) + 1;
    d.scope = ScopeRecorder::rolling(tc, d.cfg.dt_plant, rows);
  }

  d.accept_stream();
  d.accept_http();
  d.work.emplace(asio::make_work_guard(d.ioc));
  d.running = true;
  d.started = true;
  d.io_thread = std::thread([&d] { d.ioc.run(); });
  d.sim_thread = std::thread([&d] { d.run_simulation(); });
}

void BenchServer::stop() {
  auto& d = *impl_;
  if (!d.started || d.stopped) return;
  d.stopped = true;
  d.running = false;
  if (d.sim_thread.joinable()) d.sim_thread.join();
  asio::post(d.ioc, [&d] {
    beast::error_code ignored;
    d.stream_acceptor.close(ignored);
    d.http_acceptor.close(ignored);
  });
  d.work.reset();
  d.ioc.stop();
  if (d.io_thread.joinable()) d.io_thread.join();
  d.flush_scope();
}

std::uint16_t BenchServer::tcp_port() const { return impl_->bound_stream_port; }

std::uint16_t BenchServer::http_port() const { return impl_->bound_http_port; }

int serve(const SimConfig& cfg, const ServeOptions& opts) {
  BenchServer server(cfg, opts);
  server.start();
  std::cerr << "simbench: stream protocol on port " << server.tcp_port() << ", gateway on port "
            << server.http_port() << "\n";

  asio::io_context signals_ctx;
  asio::signal_set signals(signals_ctx, SIGINT, SIGTERM);
  signals.async_wait([](beast::error_code, int) {});
  signals_ctx.run();

  std::cerr << "simbench: shutting down\n";
  server.stop();
  return 0;
}

}  // namespace simbench
