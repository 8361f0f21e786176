#include <gtest/gtest.h>

#include "codea11y/config.hpp"
#include "support.hpp"

using namespace codea11y;

namespace {

ErrorKind kind_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::invalid_input;
}

}  // namespace

TEST(Config, Defaults) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.listen_address, "127.0.0.1");
  EXPECT_EQ(cfg.port, 8080);
  EXPECT_EQ(cfg.client, ClientKind::scripted);
  EXPECT_EQ(cfg.session.budget_chars, 4000u);
  EXPECT_EQ(cfg.session.refresh_interval, std::chrono::seconds(5));
  EXPECT_FALSE(cfg.session.strict_invocation);
  EXPECT_EQ(cfg.session.notification_style, NotificationStyle::popup);
  EXPECT_EQ(cfg.remote.timeout, std::chrono::seconds(60));
}

TEST(Config, AllKeys) {
  const auto cfg = parse_config(R"(# service
listen_address = 0.0.0.0
port = 0
project_root = site
model_client = remote
script = demo.json
remote_endpoint = https://models.example.com
remote_model = small
remote_timeout_s = 20
notification_style = modal
budget_chars = 2048
refresh_interval_s = 2
strict_invocation = true
mention = @helper
transcript_dir = logs
rules = form-label, img-alt
)",
                                "/srv");
  EXPECT_EQ(cfg.listen_address, "0.0.0.0");
  EXPECT_EQ(cfg.port, 0);
  EXPECT_EQ(cfg.project_root, std::filesystem::path("/srv/site"));
  EXPECT_EQ(cfg.client, ClientKind::remote);
  EXPECT_EQ(cfg.script, std::filesystem::path("/srv/demo.json"));
  EXPECT_EQ(cfg.remote.endpoint, "https://models.example.com");
  EXPECT_EQ(cfg.remote.model, "small");
  EXPECT_EQ(cfg.remote.timeout, std::chrono::seconds(20));
  EXPECT_EQ(cfg.session.notification_style, NotificationStyle::modal);
  EXPECT_EQ(cfg.session.budget_chars, 2048u);
  EXPECT_EQ(cfg.session.refresh_interval, std::chrono::seconds(2));
  EXPECT_TRUE(cfg.session.strict_invocation);
  EXPECT_EQ(cfg.session.mention, "@helper");
  EXPECT_EQ(cfg.session.transcript_dir, std::filesystem::path("/srv/logs"));
  EXPECT_EQ(cfg.session.rules.enabled, (std::set<std::string>{"form-label", "img-alt"}));
}

TEST(Config, UnknownKeyNamed) {
  try {
    parse_config("port = 1\napi_key = secret\n");
    FAIL();
  } catch (const UnknownConfigKey& e) {
    EXPECT_EQ(e.key(), "api_key");
    EXPECT_STREQ(e.what(), "unknown config key: api_key");
    EXPECT_EQ(e.kind(), ErrorKind::config_error);
  }
}

TEST(Config, RangeChecks) {
  EXPECT_EQ(kind_of("budget_chars = 511"), ErrorKind::config_error);
  EXPECT_NO_THROW(parse_config("budget_chars = 512"));
  EXPECT_EQ(kind_of("refresh_interval_s = 0"), ErrorKind::config_error);
  EXPECT_EQ(kind_of("port = 70000"), ErrorKind::config_error);
  EXPECT_EQ(kind_of("port = 80x"), ErrorKind::config_error);
  EXPECT_EQ(kind_of("notification_style = toast"), ErrorKind::config_error);
  EXPECT_EQ(kind_of("model_client = psychic"), ErrorKind::config_error);
  EXPECT_EQ(kind_of("strict_invocation = maybe"), ErrorKind::config_error);
  EXPECT_EQ(kind_of("rules = no-such-rule"), ErrorKind::config_error);
  EXPECT_EQ(kind_of("just some words"), ErrorKind::config_error);
}

TEST(Config, LoadFile) {
  testing_support::TempDir dir("cfg");
  dir.write("a.conf", "project_root = proj\nport = 9000\n");
  const auto cfg = load_config(dir.path() / "a.conf");
  EXPECT_EQ(cfg.port, 9000);
  EXPECT_EQ(cfg.project_root, dir.path() / "proj");
  EXPECT_THROW(load_config(dir.path() / "missing.conf"), Error);
}
