#include "geosocial/storage/store.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <utility>

namespace geosocial {

namespace {

constexpr const char* kSchemaV1 = R"sql(
CREATE TABLE IF NOT EXISTS users (
    user_id       INTEGER PRIMARY KEY AUTOINCREMENT,
    first_name    TEXT NOT NULL,
    last_name     TEXT NOT NULL,
    email         TEXT NOT NULL UNIQUE,
    country       TEXT NOT NULL,
    gender        TEXT NOT NULL,
    date_of_birth TEXT NOT NULL,
    created_at    INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS credentials (
    user_id    INTEGER PRIMARY KEY REFERENCES users(user_id),
    salt       BLOB NOT NULL,
    digest     BLOB NOT NULL,
    iterations INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    token_digest TEXT PRIMARY KEY,
    user_id      INTEGER NOT NULL REFERENCES users(user_id),
    issued_at    INTEGER NOT NULL,
    expires_at   INTEGER NOT NULL,
    CHECK (expires_at > issued_at)
);
CREATE TABLE IF NOT EXISTS friendships (
    user_lo      INTEGER NOT NULL REFERENCES users(user_id),
    user_hi      INTEGER NOT NULL REFERENCES users(user_id),
    requester_id INTEGER NOT NULL REFERENCES users(user_id),
    state        TEXT NOT NULL CHECK (state IN ('pending', 'accepted', 'rejected')),
    updated_at   INTEGER NOT NULL,
    PRIMARY KEY (user_lo, user_hi),
    CHECK (user_lo < user_hi),
    CHECK (requester_id = user_lo OR requester_id = user_hi)
);
CREATE TABLE IF NOT EXISTS posts (
    post_id    INTEGER PRIMARY KEY AUTOINCREMENT,
    author_id  INTEGER NOT NULL REFERENCES users(user_id),
    body       TEXT NOT NULL,
    media_ref  TEXT,
    created_at INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS posts_by_author ON posts(author_id, post_id);
CREATE TABLE IF NOT EXISTS conversations (
    conversation_id INTEGER PRIMARY KEY AUTOINCREMENT,
    user_lo         INTEGER NOT NULL REFERENCES users(user_id),
    user_hi         INTEGER NOT NULL REFERENCES users(user_id),
    UNIQUE (user_lo, user_hi),
    CHECK (user_lo < user_hi)
);
CREATE TABLE IF NOT EXISTS messages (
    message_id      INTEGER PRIMARY KEY AUTOINCREMENT,
    conversation_id INTEGER NOT NULL REFERENCES conversations(conversation_id),
    seq             INTEGER NOT NULL,
    sender_id       INTEGER NOT NULL REFERENCES users(user_id),
    body            TEXT NOT NULL,
    sent_at         INTEGER NOT NULL,
    UNIQUE (conversation_id, seq)
);
CREATE TABLE IF NOT EXISTS location_fixes (
    fix_id         INTEGER PRIMARY KEY AUTOINCREMENT,
    user_id        INTEGER NOT NULL REFERENCES users(user_id),
    lat            REAL NOT NULL CHECK (lat BETWEEN -90 AND 90),
    lon            REAL NOT NULL CHECK (lon BETWEEN -180 AND 180),
    rms_residual_m REAL NOT NULL,
    recorded_at    INTEGER NOT NULL,
    source         TEXT NOT NULL CHECK (source IN ('estimated', 'client_reported'))
);
CREATE INDEX IF NOT EXISTS fixes_by_user ON location_fixes(user_id, recorded_at, fix_id);
)sql";

bool is_connectivity_failure(int rc) {
    switch (rc & 0xff) {
        case SQLITE_IOERR:
        case SQLITE_CANTOPEN:
        case SQLITE_BUSY:
        case SQLITE_LOCKED:
        case SQLITE_FULL:
        case SQLITE_NOTADB:
        case SQLITE_CORRUPT:
            return true;
        default:
            return false;
    }
}

Error sqlite_error(sqlite3* db, int rc) {
    std::string msg = db ? sqlite3_errmsg(db) : sqlite3_errstr(rc);
    if ((rc & 0xff) == SQLITE_CONSTRAINT) {
        // "UNIQUE constraint failed: users.email" -> "users.email"
        std::string name = msg;
        if (auto colon = msg.rfind(": "); colon != std::string::npos) name = msg.substr(colon + 2);
        return {ErrorCode::constraint, msg, name};
    }
    if (is_connectivity_failure(rc)) return {ErrorCode::connectivity, msg};
    return {ErrorCode::internal, msg};
}

// Prepared statement bound to the lifetime of one call.
class Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        rc_ = sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr);
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    bool prepared() const { return rc_ == SQLITE_OK; }
    Error error() const { return sqlite_error(db_, rc_); }

    Statement& bind(int idx, std::int64_t v) {
        sqlite3_bind_int64(stmt_, idx, v);
        return *this;
    }
    Statement& bind(int idx, int v) { return bind(idx, static_cast<std::int64_t>(v)); }
    Statement& bind(int idx, double v) {
        sqlite3_bind_double(stmt_, idx, v);
        return *this;
    }
    Statement& bind(int idx, std::string_view v) {
        sqlite3_bind_text(stmt_, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
        return *this;
    }
    Statement& bind_blob(int idx, std::string_view v) {
        sqlite3_bind_blob(stmt_, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
        return *this;
    }
    Statement& bind_null(int idx) {
        sqlite3_bind_null(stmt_, idx);
        return *this;
    }
    template <typename Tag>
    Statement& bind(int idx, Id<Tag> id) {
        return bind(idx, id.value);
    }
    Statement& bind(int idx, Timestamp t) { return bind(idx, to_micros(t)); }

    // true while a row is available; sets rc_ on failure.
    bool step() {
        rc_ = sqlite3_step(stmt_);
        return rc_ == SQLITE_ROW;
    }
    bool done() const { return rc_ == SQLITE_DONE; }

    Status run() {
        if (!prepared()) return error();
        step();
        if (!done()) return error();
        return {};
    }

    std::int64_t i64(int col) const { return sqlite3_column_int64(stmt_, col); }
    double real(int col) const { return sqlite3_column_double(stmt_, col); }
    bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
    std::string text(int col) const {
        const auto* p = sqlite3_column_text(stmt_, col);
        return p ? std::string(reinterpret_cast<const char*>(p),
                               static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
                 : std::string();
    }
    std::string blob(int col) const {
        const auto* p = static_cast<const char*>(sqlite3_column_blob(stmt_, col));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
                 : std::string();
    }
    Timestamp time(int col) const { return from_micros(i64(col)); }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
    int rc_ = SQLITE_OK;
};

std::pair<std::int64_t, std::int64_t> canonical_pair(UserId a, UserId b) {
    return {std::min(a.value, b.value), std::max(a.value, b.value)};
}

Error not_found(std::string what) { return {ErrorCode::not_found, std::move(what) + " not found"}; }

constexpr const char* kUserColumns =
    "user_id, first_name, last_name, email, country, gender, date_of_birth, created_at";

Result<UserProfile> read_user(const Statement& st) {
    auto email = EmailAddress::parse(st.text(3));
    auto dob = parse_date(st.text(6));
    if (!email || !dob) return Error{ErrorCode::internal, "corrupt user row"};
    return UserProfile{UserId{st.i64(0)}, st.text(1), st.text(2), std::move(*email),
                       st.text(4),        st.text(5), *dob,       st.time(7)};
}

Result<Friendship> read_friendship(const Statement& st) {
    // columns: user_lo, user_hi, requester_id, state, updated_at
    const auto lo = st.i64(0), hi = st.i64(1), req = st.i64(2);
    auto state = parse_friendship_state(st.text(3));
    if (!state) return Error{ErrorCode::internal, "corrupt friendship row"};
    return Friendship{UserId{req}, UserId{req == lo ? hi : lo}, *state, st.time(4)};
}

Post read_post(const Statement& st) {
    Post p{PostId{st.i64(0)}, UserId{st.i64(1)}, st.text(2), std::nullopt, st.time(4)};
    if (!st.is_null(3)) p.media_ref = st.text(3);
    return p;
}

LocationFix read_fix(const Statement& st) {
    return LocationFix{FixId{st.i64(0)},
                       UserId{st.i64(1)},
                       GeodeticPoint{st.real(2), st.real(3)},
                       st.real(4),
                       st.time(5),
                       st.text(6) == "estimated" ? FixSource::estimated
                                                 : FixSource::client_reported};
}

Result<int> read_version(sqlite3* db) {
    Statement st(db, "SELECT version FROM schema_meta LIMIT 1");
    if (!st.prepared()) return st.error();
    if (st.step()) return static_cast<int>(st.i64(0));
    if (!st.done()) return st.error();
    return 0;
}

}  // namespace

Error connectivity_error() { return {ErrorCode::connectivity, "storage is unreachable"}; }

std::string_view to_string(FixSource s) noexcept {
    return s == FixSource::estimated ? "estimated" : "client_reported";
}

// --- Database -------------------------------------------------------------

Result<Database> Database::open(const std::string& path) {
    sqlite3* db = nullptr;
    const int rc = sqlite3_open_v2(path.c_str(), &db,
                                   SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE |
                                       SQLITE_OPEN_FULLMUTEX,
                                   nullptr);
    if (rc != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : sqlite3_errstr(rc);
        sqlite3_close(db);
        return Error{ErrorCode::io, "cannot open database '" + path + "': " + msg};
    }
    sqlite3_busy_timeout(db, 5000);
    Database out(db);
    if (auto st = out.exec("PRAGMA foreign_keys = ON"); !st) return st.error();
    return out;
}

Database::Database(Database&& other) noexcept : db_(std::exchange(other.db_, nullptr)) {}

Database& Database::operator=(Database&& other) noexcept {
    if (this != &other) {
        sqlite3_close(db_);
        db_ = std::exchange(other.db_, nullptr);
    }
    return *this;
}

Database::~Database() { sqlite3_close(db_); }

Status Database::exec(const char* sql) {
    char* err = nullptr;
    const int rc = sqlite3_exec(db_, sql, nullptr, nullptr, &err);
    if (rc != SQLITE_OK) {
        Error e = sqlite_error(db_, rc);
        if (err) e.message = err;
        sqlite3_free(err);
        return e;
    }
    return {};
}

Result<int> migrate(Database& db) {
    if (auto st = db.exec("CREATE TABLE IF NOT EXISTS schema_meta (version INTEGER NOT NULL)");
        !st)
        return Error{ErrorCode::io, st.error().message};
    auto version = read_version(db.handle());
    if (!version) return version.error();
    if (*version > kSchemaVersion)
        return Error{ErrorCode::version_downgrade,
                     "database schema v" + std::to_string(*version) +
                         " is newer than supported v" + std::to_string(kSchemaVersion)};
    if (*version == kSchemaVersion) return kSchemaVersion;

    if (auto st = db.exec("BEGIN IMMEDIATE"); !st) return st.error();
    auto fail = [&](Error e) -> Result<int> {
        (void)db.exec("ROLLBACK");
        return e;
    };
    if (auto st = db.exec(kSchemaV1); !st) return fail(st.error());
    if (auto st = db.exec("DELETE FROM schema_meta"); !st) return fail(st.error());
    {
        Statement ins(db.handle(), "INSERT INTO schema_meta(version) VALUES (?)");
        if (auto st = ins.bind(1, kSchemaVersion).run(); !st) return fail(st.error());
    }
    if (auto st = db.exec("COMMIT"); !st) return fail(st.error());
    return kSchemaVersion;
}

Result<int> migrate(const std::string& db_path) {
    auto db = Database::open(db_path);
    if (!db) return db.error();
    return migrate(*db);
}

// --- Store ----------------------------------------------------------------

Result<std::shared_ptr<Store>> Store::open(const std::string& path) {
    auto db = Database::open(path);
    if (!db) return db.error();
    auto version = migrate(*db);
    if (!version) return version.error();
    return std::shared_ptr<Store>(new Store(std::move(*db), *version));
}

Status Store::begin() { return db_.exec("BEGIN IMMEDIATE"); }
Status Store::commit() { return db_.exec("COMMIT"); }
void Store::rollback() noexcept {
    if (!sqlite3_get_autocommit(db_.handle())) (void)db_.exec("ROLLBACK");
}

// --- Transaction: users ---------------------------------------------------

Result<UserId> Transaction::put_user(const UserProfile& p) {
    Statement st(db_,
                 "INSERT INTO users(first_name, last_name, email, country, gender, "
                 "date_of_birth, created_at) VALUES (?, ?, ?, ?, ?, ?, ?)");
    if (!st.prepared()) return st.error();
    st.bind(1, p.first_name)
        .bind(2, p.last_name)
        .bind(3, p.email.str())
        .bind(4, p.country)
        .bind(5, p.gender)
        .bind(6, format_date(p.date_of_birth))
        .bind(7, p.created_at);
    if (auto r = st.run(); !r) return r.error();
    return UserId{sqlite3_last_insert_rowid(db_)};
}

Result<UserProfile> Transaction::get_user(UserId id) {
    const std::string sql = std::string("SELECT ") + kUserColumns + " FROM users WHERE user_id = ?";
    Statement st(db_, sql.c_str());
    if (!st.prepared()) return st.error();
    st.bind(1, id);
    if (st.step()) return read_user(st);
    if (!st.done()) return st.error();
    return not_found("user");
}

Result<UserProfile> Transaction::find_user_by_email(const EmailAddress& email) {
    const std::string sql = std::string("SELECT ") + kUserColumns + " FROM users WHERE email = ?";
    Statement st(db_, sql.c_str());
    if (!st.prepared()) return st.error();
    st.bind(1, email.str());
    if (st.step()) return read_user(st);
    if (!st.done()) return st.error();
    return not_found("user");
}

Result<std::vector<UserProfile>> Transaction::list_users() {
    const std::string sql = std::string("SELECT ") + kUserColumns + " FROM users ORDER BY user_id";
    Statement st(db_, sql.c_str());
    if (!st.prepared()) return st.error();
    std::vector<UserProfile> out;
    while (st.step()) {
        auto u = read_user(st);
        if (!u) return u.error();
        out.push_back(std::move(*u));
    }
    if (!st.done()) return st.error();
    return out;
}

Result<bool> Transaction::user_exists(UserId id) {
    Statement st(db_, "SELECT 1 FROM users WHERE user_id = ?");
    if (!st.prepared()) return st.error();
    st.bind(1, id);
    if (st.step()) return true;
    if (!st.done()) return st.error();
    return false;
}

// --- credentials and sessions ----------------------------------------------

Status Transaction::put_credential(const CredentialRecord& c) {
    Statement st(db_,
                 "INSERT INTO credentials(user_id, salt, digest, iterations) VALUES (?, ?, ?, ?)");
    if (!st.prepared()) return st.error();
    st.bind(1, c.user_id).bind_blob(2, c.salt).bind_blob(3, c.digest).bind(4, c.iterations);
    return st.run();
}

Result<CredentialRecord> Transaction::get_credential(UserId id) {
    Statement st(db_, "SELECT user_id, salt, digest, iterations FROM credentials WHERE user_id = ?");
    if (!st.prepared()) return st.error();
    st.bind(1, id);
    if (st.step())
        return CredentialRecord{UserId{st.i64(0)}, st.blob(1), st.blob(2),
                                static_cast<int>(st.i64(3))};
    if (!st.done()) return st.error();
    return not_found("credential");
}

Status Transaction::put_session(const SessionRecord& s) {
    Statement st(db_,
                 "INSERT INTO sessions(token_digest, user_id, issued_at, expires_at) "
                 "VALUES (?, ?, ?, ?)");
    if (!st.prepared()) return st.error();
    st.bind(1, s.token_digest).bind(2, s.user_id).bind(3, s.issued_at).bind(4, s.expires_at);
    return st.run();
}

Result<SessionRecord> Transaction::get_session(const std::string& token_digest) {
    Statement st(db_,
                 "SELECT token_digest, user_id, issued_at, expires_at FROM sessions "
                 "WHERE token_digest = ?");
    if (!st.prepared()) return st.error();
    st.bind(1, token_digest);
    if (st.step()) return SessionRecord{st.text(0), UserId{st.i64(1)}, st.time(2), st.time(3)};
    if (!st.done()) return st.error();
    return not_found("session");
}

// --- friendships -------------------------------------------------------------

Status Transaction::insert_friendship(const Friendship& f) {
    const auto [lo, hi] = canonical_pair(f.requester_id, f.addressee_id);
    Statement st(db_,
                 "INSERT INTO friendships(user_lo, user_hi, requester_id, state, updated_at) "
                 "VALUES (?, ?, ?, ?, ?)");
    if (!st.prepared()) return st.error();
    st.bind(1, lo).bind(2, hi).bind(3, f.requester_id).bind(4, to_string(f.state)).bind(5,
                                                                                      f.updated_at);
    return st.run();
}

Status Transaction::update_friendship(const Friendship& f) {
    const auto [lo, hi] = canonical_pair(f.requester_id, f.addressee_id);
    Statement st(db_,
                 "UPDATE friendships SET state = ?, updated_at = ? "
                 "WHERE user_lo = ? AND user_hi = ? AND requester_id = ?");
    if (!st.prepared()) return st.error();
    st.bind(1, to_string(f.state)).bind(2, f.updated_at).bind(3, lo).bind(4, hi).bind(
        5, f.requester_id);
    if (auto r = st.run(); !r) return r;
    if (sqlite3_changes(db_) == 0) return not_found("friendship");
    return {};
}

Result<Friendship> Transaction::get_friendship(UserId a, UserId b) {
    const auto [lo, hi] = canonical_pair(a, b);
    Statement st(db_,
                 "SELECT user_lo, user_hi, requester_id, state, updated_at FROM friendships "
                 "WHERE user_lo = ? AND user_hi = ?");
    if (!st.prepared()) return st.error();
    st.bind(1, lo).bind(2, hi);
    if (st.step()) return read_friendship(st);
    if (!st.done()) return st.error();
    return not_found("friendship");
}

Result<std::vector<UserId>> Transaction::list_friends(UserId id) {
    Statement st(db_,
                 "SELECT CASE WHEN user_lo = ?1 THEN user_hi ELSE user_lo END AS other "
                 "FROM friendships WHERE (user_lo = ?1 OR user_hi = ?1) AND state = 'accepted' "
                 "ORDER BY other");
    if (!st.prepared()) return st.error();
    st.bind(1, id);
    std::vector<UserId> out;
    while (st.step()) out.emplace_back(st.i64(0));
    if (!st.done()) return st.error();
    return out;
}

// --- posts ---------------------------------------------------------------------

Result<PostId> Transaction::put_post(const Post& p) {
    Statement st(db_,
                 "INSERT INTO posts(author_id, body, media_ref, created_at) VALUES (?, ?, ?, ?)");
    if (!st.prepared()) return st.error();
    st.bind(1, p.author_id).bind(2, p.body).bind(4, p.created_at);
    if (p.media_ref)
        st.bind(3, *p.media_ref);
    else
        st.bind_null(3);
    if (auto r = st.run(); !r) return r.error();
    return PostId{sqlite3_last_insert_rowid(db_)};
}

Result<Post> Transaction::get_post(PostId id) {
    Statement st(db_,
                 "SELECT post_id, author_id, body, media_ref, created_at FROM posts "
                 "WHERE post_id = ?");
    if (!st.prepared()) return st.error();
    st.bind(1, id);
    if (st.step()) return read_post(st);
    if (!st.done()) return st.error();
    return not_found("post");
}

Result<std::vector<Post>> Transaction::list_posts(UserId author) {
    Statement st(db_,
                 "SELECT post_id, author_id, body, media_ref, created_at FROM posts "
                 "WHERE author_id = ? ORDER BY post_id");
    if (!st.prepared()) return st.error();
    st.bind(1, author);
    std::vector<Post> out;
    while (st.step()) out.push_back(read_post(st));
    if (!st.done()) return st.error();
    return out;
}

// --- messages ----------------------------------------------------------------

Result<Message> Transaction::append_message(UserId sender, UserId recipient,
                                            const std::string& body, Timestamp sent_at) {
    const auto [lo, hi] = canonical_pair(sender, recipient);
    {
        Statement st(db_,
                     "INSERT INTO conversations(user_lo, user_hi) VALUES (?, ?) "
                     "ON CONFLICT(user_lo, user_hi) DO NOTHING");
        if (!st.prepared()) return st.error();
        if (auto r = st.bind(1, lo).bind(2, hi).run(); !r) return r.error();
    }
    std::int64_t conversation = 0;
    std::int64_t seq = 0;
    {
        Statement st(db_,
                     "SELECT c.conversation_id, COALESCE(MAX(m.seq), 0) + 1 FROM conversations c "
                     "LEFT JOIN messages m ON m.conversation_id = c.conversation_id "
                     "WHERE c.user_lo = ? AND c.user_hi = ? GROUP BY c.conversation_id");
        if (!st.prepared()) return st.error();
        st.bind(1, lo).bind(2, hi);
        if (!st.step()) return st.error();
        conversation = st.i64(0);
        seq = st.i64(1);
    }
    Statement st(db_,
                 "INSERT INTO messages(conversation_id, seq, sender_id, body, sent_at) "
                 "VALUES (?, ?, ?, ?, ?)");
    if (!st.prepared()) return st.error();
    st.bind(1, conversation).bind(2, seq).bind(3, sender).bind(4, body).bind(5, sent_at);
    if (auto r = st.run(); !r) return r.error();
    return Message{MessageId{sqlite3_last_insert_rowid(db_)}, sender, recipient, body, sent_at, seq};
}

Result<std::vector<Message>> Transaction::list_messages(UserId a, UserId b,
                                                        std::int64_t after_seq) {
    const auto [lo, hi] = canonical_pair(a, b);
    Statement st(db_,
                 "SELECT m.message_id, m.sender_id, m.body, m.sent_at, m.seq FROM messages m "
                 "JOIN conversations c ON c.conversation_id = m.conversation_id "
                 "WHERE c.user_lo = ? AND c.user_hi = ? AND m.seq > ? ORDER BY m.seq");
    if (!st.prepared()) return st.error();
    st.bind(1, lo).bind(2, hi).bind(3, after_seq);
    std::vector<Message> out;
    while (st.step()) {
        const UserId sender{st.i64(1)};
        const UserId recipient{sender.value == lo ? hi : lo};
        out.push_back(Message{MessageId{st.i64(0)}, sender, recipient, st.text(2), st.time(3),
                              st.i64(4)});
    }
    if (!st.done()) return st.error();
    return out;
}

// --- location fixes ----------------------------------------------------------

Result<FixId> Transaction::put_fix(const LocationFix& f) {
    Statement st(db_,
                 "INSERT INTO location_fixes(user_id, lat, lon, rms_residual_m, recorded_at, "
                 "source) VALUES (?, ?, ?, ?, ?, ?)");
    if (!st.prepared()) return st.error();
    st.bind(1, f.user_id)
        .bind(2, f.point.lat_deg)
        .bind(3, f.point.lon_deg)
        .bind(4, f.rms_residual_m)
        .bind(5, f.recorded_at)
        .bind(6, to_string(f.source));
    if (auto r = st.run(); !r) return r.error();
    return FixId{sqlite3_last_insert_rowid(db_)};
}

Result<std::optional<LocationFix>> Transaction::latest_fix(UserId user) {
    Statement st(db_,
                 "SELECT fix_id, user_id, lat, lon, rms_residual_m, recorded_at, source "
                 "FROM location_fixes WHERE user_id = ? "
                 "ORDER BY recorded_at DESC, fix_id DESC LIMIT 1");
    if (!st.prepared()) return st.error();
    st.bind(1, user);
    if (st.step()) return std::optional<LocationFix>(read_fix(st));
    if (!st.done()) return st.error();
    return std::optional<LocationFix>{};
}

Result<std::vector<LocationFix>> Transaction::list_fixes(UserId user, Timestamp from,
                                                         Timestamp to) {
    Statement st(db_,
                 "SELECT fix_id, user_id, lat, lon, rms_residual_m, recorded_at, source "
                 "FROM location_fixes WHERE user_id = ? AND recorded_at BETWEEN ? AND ? "
                 "ORDER BY recorded_at, fix_id");
    if (!st.prepared()) return st.error();
    st.bind(1, user).bind(2, from).bind(3, to);
    std::vector<LocationFix> out;
    while (st.step()) out.push_back(read_fix(st));
    if (!st.done()) return st.error();
    return out;
}

}  // namespace geosocial
