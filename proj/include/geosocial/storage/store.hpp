#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "geosocial/common/result.hpp"
#include "geosocial/domain/model.hpp"
#include "geosocial/geoloc/geodetic.hpp"

struct sqlite3;

namespace geosocial {

inline constexpr int kSchemaVersion = 1;

struct CredentialRecord {
    UserId user_id;
    std::string salt;    // raw bytes
    std::string digest;  // raw bytes
    int iterations = 0;

    friend bool operator==(const CredentialRecord&, const CredentialRecord&) = default;
};

struct SessionRecord {
    std::string token_digest;  // hex SHA-256 of the bearer token
    UserId user_id;
    Timestamp issued_at;
    Timestamp expires_at;

    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

enum class FixSource { estimated, client_reported };

std::string_view to_string(FixSource s) noexcept;

struct LocationFix {
    FixId fix_id;
    UserId user_id;
    GeodeticPoint point;
    double rms_residual_m = 0.0;
    Timestamp recorded_at;
    FixSource source = FixSource::client_reported;

    friend bool operator==(const LocationFix&, const LocationFix&) = default;
};

// Owning handle to one SQLite connection.
class Database {
public:
    static Result<Database> open(const std::string& path);

    Database(Database&&) noexcept;
    Database& operator=(Database&&) noexcept;
    Database(const Database&) = delete;
    Database& operator=(const Database&) = delete;
    ~Database();

    Status exec(const char* sql);
    sqlite3* handle() const noexcept { return db_; }

private:
    explicit Database(sqlite3* db) : db_(db) {}
    sqlite3* db_ = nullptr;
};

// Creates or upgrades the schema in place; returns the resulting version.
Result<int> migrate(Database& db);
Result<int> migrate(const std::string& db_path);

class Store;

// Repository operations. Only reachable inside Store::transact, so every
// write belongs to exactly one transaction.
class Transaction {
public:
    // users
    Result<UserId> put_user(const UserProfile& profile);
    Result<UserProfile> get_user(UserId id);
    Result<UserProfile> find_user_by_email(const EmailAddress& email);
    Result<std::vector<UserProfile>> list_users();
    Result<bool> user_exists(UserId id);

    // credentials and sessions
    Status put_credential(const CredentialRecord& cred);
    Result<CredentialRecord> get_credential(UserId id);
    Status put_session(const SessionRecord& session);
    Result<SessionRecord> get_session(const std::string& token_digest);

    // friendships; one row per unordered pair
    Status insert_friendship(const Friendship& f);
    Status update_friendship(const Friendship& f);
    Result<Friendship> get_friendship(UserId a, UserId b);
    Result<std::vector<UserId>> list_friends(UserId id);

    // posts
    Result<PostId> put_post(const Post& post);
    Result<Post> get_post(PostId id);
    Result<std::vector<Post>> list_posts(UserId author);

    // messages; seq is assigned here, per unordered conversation pair
    Result<Message> append_message(UserId sender, UserId recipient, const std::string& body,
                                   Timestamp sent_at);
    Result<std::vector<Message>> list_messages(UserId a, UserId b, std::int64_t after_seq = 0);

    // location fixes
    Result<FixId> put_fix(const LocationFix& fix);
    Result<std::optional<LocationFix>> latest_fix(UserId user);
    Result<std::vector<LocationFix>> list_fixes(UserId user, Timestamp from, Timestamp to);

private:
    friend class Store;
    explicit Transaction(sqlite3* db) : db_(db) {}
    sqlite3* db_;
};

// Embedded relational store. Writers are serialized one transaction at a
// time; every operation is linearizable.
class Store {
public:
    static Result<std::shared_ptr<Store>> open(const std::string& path);

    // Runs work(Transaction&) atomically. work returns a Result<T> or Status;
    // an error result or an exception rolls everything back.
    template <typename Work>
    auto transact(Work&& work) -> std::invoke_result_t<Work, Transaction&>;

    // Fault injection for the storage-unreachable path: while offline every
    // transaction fails with ErrorCode::connectivity before touching data.
    void set_reachable(bool reachable) noexcept { reachable_ = reachable; }
    bool reachable() const noexcept { return reachable_; }

    int schema_version() const noexcept { return version_; }

private:
    Store(Database db, int version) : db_(std::move(db)), version_(version) {}

    Status begin();
    Status commit();
    void rollback() noexcept;

    Database db_;
    int version_;
    std::mutex mutex_;
    std::atomic<bool> reachable_{true};
};

Error connectivity_error();

template <typename Work>
auto Store::transact(Work&& work) -> std::invoke_result_t<Work, Transaction&> {
    using R = std::invoke_result_t<Work, Transaction&>;
    std::lock_guard lock(mutex_);
    if (!reachable_) return R(connectivity_error());
    if (auto st = begin(); !st) return R(st.error());
    Transaction tx(db_.handle());
    try {
        R result = work(tx);
        if (!result.ok() || !reachable_) {
            rollback();
            if (result.ok()) return R(connectivity_error());
            return result;
        }
        if (auto st = commit(); !st) {
            rollback();
            return R(st.error());
        }
        return result;
    } catch (...) {
        rollback();
        throw;
    }
}

}  // namespace geosocial
