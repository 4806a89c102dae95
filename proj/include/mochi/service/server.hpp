// WebSocket service: owns the world, streams snapshots at 10 Hz, accepts one operator
#pragma once

#include <mochi/service/ui_protocol.hpp>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

namespace mochi::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct ServeOptions {
    std::uint16_t port = 8765;
    std::string address = "127.0.0.1";
    double speed = 1.0;        ///< simulated seconds per wall second
    double duration = 0.0;     ///< stop after this much simulated time; 0 runs forever
    double snapshot_period = 0.1;
    std::string record_path;   ///< JSONL snapshot log, empty for none
};

class Server;

class Session : public std::enable_shared_from_this<Session> {
  public:
    Session(tcp::socket socket, Server &server) : ws_(std::move(socket)), server_(server) {}

    void start();
    void send(std::string text) {
        if (closed_) {
            return;
        }
        outbox_.push_back(std::move(text));
        if (outbox_.size() == 1) {
            write_next();
        }
    }
    void close_after_flush() { close_pending_ = true; if (outbox_.empty()) do_close(); }
    bool closed() const { return closed_; }

  private:
    void read_next();
    void write_next() {
        ws_.text(true);
        ws_.async_write(asio::buffer(outbox_.front()),
                        [self = shared_from_this()](beast::error_code ec, std::size_t) {
                            if (ec) {
                                self->fail();
                                return;
                            }
                            self->outbox_.pop_front();
                            if (!self->outbox_.empty()) {
                                self->write_next();
                            } else if (self->close_pending_) {
                                self->do_close();
                            }
                        });
    }
    void do_close() {
        if (closed_) {
            return;
        }
        ws_.async_close(websocket::close_code::policy_error,
                        [self = shared_from_this()](beast::error_code) { self->fail(); });
    }
    void fail();

    websocket::stream<beast::tcp_stream> ws_;
    Server &server_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    bool closed_ = false;
    bool close_pending_ = false;
    bool operator_ = false;
};

class Server {
  public:
    Server(asio::io_context &io, sim::World &world, ServeOptions opt)
        : io_(io), world_(world), opt_(opt), acceptor_(io), timer_(io) {
        const tcp::endpoint ep(asio::ip::make_address(opt_.address), opt_.port);
        acceptor_.open(ep.protocol());
        acceptor_.set_option(asio::socket_base::reuse_address(true));
        acceptor_.bind(ep);
        acceptor_.listen();
        if (!opt_.record_path.empty()) {
            record_.open(opt_.record_path, std::ios::trunc);
            if (!record_) {
                throw std::runtime_error("cannot open record file " + opt_.record_path);
            }
        }
    }

    std::uint16_t port() const { return acceptor_.local_endpoint().port(); }

    void start() {
        accept();
        started_ = std::chrono::steady_clock::now();
        next_snapshot_ = world_.time();
        publish_snapshot();
        schedule();
    }

    /// Claims the single operator slot.
    bool claim(Session *s) {
        if (operator_ && operator_ != s) {
            return false;
        }
        operator_ = s;
        return true;
    }
    void release(Session *s) {
        if (operator_ == s) {
            operator_ = nullptr;
        }
        std::erase_if(sessions_, [s](const std::weak_ptr<Session> &w) {
            const auto p = w.lock();
            return !p || p.get() == s;
        });
    }

    /// Commands are applied between ticks, in arrival order.
    void on_command(Session &s, const std::string &text) { s.send(apply_command(world_, text).dump()); }

    void add(const std::shared_ptr<Session> &s) { sessions_.push_back(s); }

  private:
    void accept() {
        acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                return;
            }
            auto s = std::make_shared<Session>(std::move(socket), *this);
            s->start();
            accept();
        });
    }

    void schedule() {
        timer_.expires_after(std::chrono::milliseconds(5));
        timer_.async_wait([this](beast::error_code ec) {
            if (ec) {
                return;
            }
            advance();
            if (opt_.duration > 0.0 && world_.time() >= opt_.duration - 1e-9) {
                stop();
                return;
            }
            schedule();
        });
    }

    void advance() {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
        double target = wall * opt_.speed;
        if (opt_.duration > 0.0) {
            target = std::min(target, opt_.duration);
        }
        while (world_.time() + 0.5 * sim::kTickDt <= target) {
            world_.tick();
            for (const comms::StationEvent &e : world_.station().take_events()) {
                broadcast(event_json(e).dump());
            }
            if (world_.time() + 1e-9 >= next_snapshot_) {
                publish_snapshot();
            }
        }
    }

    void publish_snapshot() {
        const std::string text = snapshot_json(world_).dump();
        next_snapshot_ += opt_.snapshot_period;
        if (record_) {
            record_ << text << '\n';
        }
        broadcast(text);
    }

    void broadcast(const std::string &text) {
        for (const auto &w : sessions_) {
            if (const auto s = w.lock()) {
                s->send(text);
            }
        }
    }

    void stop() {
        record_.flush();
        acceptor_.close();
        io_.stop();
    }

    asio::io_context &io_;
    sim::World &world_;
    ServeOptions opt_;
    tcp::acceptor acceptor_;
    asio::steady_timer timer_;
    std::chrono::steady_clock::time_point started_;
    double next_snapshot_ = 0.0;
    std::vector<std::weak_ptr<Session>> sessions_;
    Session *operator_ = nullptr;
    std::ofstream record_;
};

inline void Session::start() {
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
        if (ec) {
            self->closed_ = true;
            return;
        }
        if (!self->server_.claim(self.get())) {
            self->send(error_reply("another operator session is active").dump());
            self->close_after_flush();
            return;
        }
        self->operator_ = true;
        self->server_.add(self);
        self->read_next();
    });
}

inline void Session::read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
            self->fail();
            return;
        }
        const std::string text = beast::buffers_to_string(self->buffer_.data());
        self->buffer_.consume(self->buffer_.size());
        self->server_.on_command(*self, text);
        self->read_next();
    });
}

inline void Session::fail() {
    if (closed_) {
        return;
    }
    closed_ = true;
    if (operator_) {
        server_.release(this);
    }
}

} // namespace mochi::service
