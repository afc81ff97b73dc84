#include "vapt/testbed/server.hpp"

#include <httplib.h>

#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/x509v3.h>

#include <condition_variable>
#include <mutex>
#include <thread>

#include "vapt/error.hpp"
#include "vapt/http/cookies.hpp"
#include "vapt/http/types.hpp"

namespace vapt::testbed {

namespace {

// SO_REUSEADDR only: the httplib default also sets SO_REUSEPORT, which would let a second
// testbed bind a port that is already serving.
void exclusive_bind(httplib::Server& server)
{
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
}

using PKey = std::unique_ptr<EVP_PKEY, decltype(&::EVP_PKEY_free)>;
using Cert = std::unique_ptr<X509, decltype(&::X509_free)>;

void add_extension(X509* cert, int nid, const char* value)
{
    X509V3_CTX ctx;
    X509V3_set_ctx_nodb(&ctx);
    X509V3_set_ctx(&ctx, cert, cert, nullptr, nullptr, 0);
    X509_EXTENSION* ext = X509V3_EXT_conf_nid(nullptr, &ctx, nid, value);
    if (ext == nullptr)
        throw Error("could not build certificate extension");
    X509_add_ext(cert, ext, -1);
    X509_EXTENSION_free(ext);
}

std::pair<Cert, PKey> self_signed(const std::string& host)
{
    PKey key(EVP_EC_gen("P-256"), ::EVP_PKEY_free);
    if (!key)
        throw Error("could not generate a testbed key");
    Cert cert(X509_new(), ::X509_free);
    X509_set_version(cert.get(), 2);
    ASN1_INTEGER_set(X509_get_serialNumber(cert.get()), 1);
    X509_gmtime_adj(X509_getm_notBefore(cert.get()), 0);
    X509_gmtime_adj(X509_getm_notAfter(cert.get()), 60L * 60 * 24 * 30);
    X509_set_pubkey(cert.get(), key.get());
    X509_NAME* name = X509_get_subject_name(cert.get());
    X509_NAME_add_entry_by_txt(name, "CN", MBSTRING_ASC, reinterpret_cast<const unsigned char*>("vapt testbed"), -1,
                               -1, 0);
    X509_set_issuer_name(cert.get(), name);
    std::string san = "DNS:localhost,IP:127.0.0.1";
    if (host != "127.0.0.1" && host != "localhost")
        san += host.find_first_not_of("0123456789.") == std::string::npos ? ",IP:" + host : ",DNS:" + host;
    add_extension(cert.get(), NID_subject_alt_name, san.c_str());
    if (X509_sign(cert.get(), key.get(), EVP_sha256()) == 0)
        throw Error("could not sign the testbed certificate");
    return {std::move(cert), std::move(key)};
}

Request convert(const httplib::Request& req, bool secure)
{
    http::Headers headers(req.headers.begin(), req.headers.end());
    return Request::from_wire(req.method, req.target, headers, req.body, secure);
}

void install(httplib::Server& server, Site& site, bool secure)
{
    auto handler = [&site, secure](const httplib::Request& req, httplib::Response& res) {
        auto out = site.handle(convert(req, secure));
        res.status = out.status;
        for (const auto& [name, value] : out.headers)
            res.headers.emplace(name, value);
        res.set_content(out.body, out.content_type);
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
    server.Patch(".*", handler);
    server.Options(".*", handler);
    server.new_task_queue = [] { return new httplib::ThreadPool(16); };
    server.set_keep_alive_max_count(100);
}

} // namespace

struct Server::Impl {
    TestbedConfig config;
    std::unique_ptr<Site> site;
    httplib::Server plain;
    std::unique_ptr<httplib::SSLServer> secure;
    std::thread plain_thread;
    std::thread secure_thread;
    std::mutex mutex;
    std::condition_variable stopped_cv;
    bool stopped = false;
    bool started = false;
};

Server::Server(TestbedConfig config) : impl_(std::make_unique<Impl>())
{
    config.validate();
    impl_->config = std::move(config);
}

Server::~Server() { stop(); }

void Server::start()
{
    auto& s = *impl_;
    if (s.started)
        throw UsageError("testbed server already started");
    auto& cfg = s.config;

    exclusive_bind(s.plain);
    int port = cfg.port == 0 ? s.plain.bind_to_any_port(cfg.host) : (s.plain.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1);
    if (port <= 0)
        throw Error("cannot bind testbed to " + cfg.host + ":" + std::to_string(cfg.port));
    cfg.port = port;

    if (cfg.tls) {
        auto [cert, key] = self_signed(cfg.host);
        s.secure = std::make_unique<httplib::SSLServer>(cert.get(), key.get());
        if (!s.secure->is_valid())
            throw Error("could not set up the testbed TLS context");
        SSL_CTX_set_min_proto_version(s.secure->ssl_context(), TLS1_2_VERSION);
        exclusive_bind(*s.secure);
        int tls_port = cfg.tls_port == 0 ? s.secure->bind_to_any_port(cfg.host)
                                         : (s.secure->bind_to_port(cfg.host, cfg.tls_port) ? cfg.tls_port : -1);
        if (tls_port <= 0) {
            s.plain.stop();
            throw Error("cannot bind testbed TLS to " + cfg.host + ":" + std::to_string(cfg.tls_port));
        }
        cfg.tls_port = tls_port;
    }

    s.site = std::make_unique<Site>(cfg);
    install(s.plain, *s.site, false);
    s.plain_thread = std::thread([&s] { s.plain.listen_after_bind(); });
    if (s.secure) {
        install(*s.secure, *s.site, true);
        s.secure_thread = std::thread([&s] { s.secure->listen_after_bind(); });
        s.secure->wait_until_ready();
    }
    s.plain.wait_until_ready();
    s.started = true;
}

void Server::stop()
{
    auto& s = *impl_;
    if (!s.started)
        return;
    s.plain.stop();
    if (s.secure)
        s.secure->stop();
    if (s.plain_thread.joinable())
        s.plain_thread.join();
    if (s.secure_thread.joinable())
        s.secure_thread.join();
    s.started = false;
    {
        std::lock_guard lock(s.mutex);
        s.stopped = true;
    }
    s.stopped_cv.notify_all();
}

void Server::wait()
{
    std::unique_lock lock(impl_->mutex);
    impl_->stopped_cv.wait(lock, [&] { return impl_->stopped; });
}

const TestbedConfig& Server::config() const { return impl_->config; }

const metrics::GroundTruthManifest& Server::manifest() const
{
    if (!impl_->site)
        throw UsageError("testbed server not started");
    return impl_->site->manifest();
}

Site& Server::site()
{
    if (!impl_->site)
        throw UsageError("testbed server not started");
    return *impl_->site;
}

} // namespace vapt::testbed
