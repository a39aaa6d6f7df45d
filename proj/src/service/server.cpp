#include "coach/service/server.hpp"

#include <deque>
#include <iostream>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

namespace coach::service {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

std::string query_param(std::string_view target, std::string_view name) {
    const auto q = target.find('?');
    if (q == target.npos) return {};
    auto rest = target.substr(q + 1);
    while (!rest.empty()) {
        const auto amp = rest.find('&');
        const auto pair = rest.substr(0, amp);
        const auto eq = pair.find('=');
        if (eq != pair.npos && pair.substr(0, eq) == name) return std::string(pair.substr(eq + 1));
        if (amp == rest.npos) break;
        rest = rest.substr(amp + 1);
    }
    return {};
}

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, SessionManager& manager, const SessionConfig& defaults)
        : ws_(std::move(socket)), manager_(manager), defaults_(defaults) {}

    void start() {
        http::async_read(ws_.next_layer(), buffer_, request_,
                         [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
    }

private:
    void on_request(beast::error_code ec) {
        if (ec) return;
        if (!websocket::is_upgrade(request_)) {
            auto res = std::make_shared<http::response<http::string_body>>(http::status::bad_request, request_.version());
            res->set(http::field::content_type, "text/plain");
            res->body() = "websocket upgrade required\n";
            res->prepare_payload();
            http::async_write(ws_.next_layer(), *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
                beast::error_code ignored;
                self->ws_.next_layer().socket().shutdown(tcp::socket::shutdown_both, ignored);
            });
            return;
        }
        ws_.async_accept(request_, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
    }

    void on_accept(beast::error_code ec) {
        if (ec) return;
        const std::string target(request_.target());
        try {
            session_ = query_param(target, "session");
            std::vector<ServerMessage> opening;
            bool history = false;
            if (session_.empty()) {
                auto config = defaults_;
                if (auto seed = query_param(target, "seed"); !seed.empty()) config.seed = std::stoull(seed);
                auto created = manager_.create_session(config);
                session_ = created.id;
                opening = std::move(created.messages);
            } else {
                manager_.inspect(session_, [](const Session&) {});  // throws for an unknown id
                history = true;
            }
            send(json{{"type", "session"}, {"session", session_}}.dump());
            for (const auto& m : opening) send(encode(m));
            std::weak_ptr<Connection> weak = shared_from_this();
            auto executor = ws_.get_executor();
            token_ = manager_.subscribe(
                session_,
                [weak, executor](const ServerMessage& m) {
                    net::post(executor, [weak, text = encode(m)]() mutable {
                        if (auto self = weak.lock()) self->send(std::move(text));
                    });
                },
                history);
            subscribed_ = true;
        } catch (const Error& e) {
            send(json{{"type", "error"}, {"code", to_string(e.code())}, {"message", e.what()}}.dump());
            return close();
        } catch (const std::exception& e) {
            send(json{{"type", "error"}, {"code", "invalid-config"}, {"message", e.what()}}.dump());
            return close();
        }
        read();
    }

    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
    }

    void on_read(beast::error_code ec) {
        if (ec) return detach();
        const auto text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        try {
            manager_.handle(session_, parse_client_message(text));
        } catch (const Error& e) {
            send(json{{"type", "error"}, {"session", session_}, {"code", to_string(e.code())}, {"message", e.what()}}.dump());
        }
        read();
    }

    void send(std::string text) {
        queue_.push_back(std::move(text));
        if (queue_.size() == 1) write();
    }

    void write() {
        ws_.text(true);
        ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->detach();
            self->queue_.pop_front();
            if (!self->queue_.empty()) self->write();
        });
    }

    void close() {
        ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) { self->detach(); });
    }

    void detach() {
        if (!subscribed_) return;
        subscribed_ = false;
        try {
            manager_.unsubscribe(session_, token_);
        } catch (const Error&) {
        }
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> request_;
    std::deque<std::string> queue_;
    SessionManager& manager_;
    const SessionConfig& defaults_;
    std::string session_;
    std::uint64_t token_ = 0;
    bool subscribed_ = false;
};

}  // namespace

struct Server::Impl {
    Impl(SessionManager& m, ServerOptions o) : manager(m), options(std::move(o)), acceptor(ioc) {}

    void accept() {
        acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                if (ec != net::error::operation_aborted) std::cerr << "accept: " << ec.message() << '\n';
            } else {
                std::make_shared<Connection>(std::move(socket), manager, options.defaults)->start();
            }
            if (acceptor.is_open()) accept();
        });
    }

    SessionManager& manager;
    ServerOptions options;
    net::io_context ioc{1};
    tcp::acceptor acceptor;
    bool listening = false;
};

Server::Server(SessionManager& manager, ServerOptions options) : impl_(std::make_unique<Impl>(manager, std::move(options))) {}

Server::~Server() = default;

std::uint16_t Server::listen() {
    auto& a = impl_->acceptor;
    if (!impl_->listening) {
        const tcp::endpoint ep(net::ip::make_address(impl_->options.host), impl_->options.port);
        a.open(ep.protocol());
        a.set_option(net::socket_base::reuse_address(true));
        a.bind(ep);
        a.listen(net::socket_base::max_listen_connections);
        impl_->listening = true;
        impl_->accept();
    }
    return a.local_endpoint().port();
}

void Server::run() {
    listen();
    impl_->ioc.run();
}

void Server::stop() {
    net::post(impl_->ioc, [this] {
        beast::error_code ignored;
        impl_->acceptor.close(ignored);
        impl_->ioc.stop();
    });
}

}  // namespace coach::service
