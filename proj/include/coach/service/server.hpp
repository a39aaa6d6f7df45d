#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "coach/service/session.hpp"

namespace coach::service {

struct ServerOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 8080;  // 0 picks a free port
    SessionConfig defaults;
};

/// WebSocket front end. Connecting to `/` creates a session (query parameter
/// `seed` overrides the default seed); `/?session=<id>` attaches to an
/// existing one and first replays its earlier messages. The server greets
/// with `{"type":"session","session":<id>}` and then speaks the wire protocol.
/// All connections share one I/O thread, which also serializes each session's inbox.
class Server {
public:
    Server(SessionManager& manager, ServerOptions options);
    ~Server();

    /// Binds the listening socket; returns the bound port.
    std::uint16_t listen();
    /// Serves until stop() is called.
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace coach::service
