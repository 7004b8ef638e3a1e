//! C ABI for the scorerate engine.
//!
//! Every function returns an [`SrStatus`]; on failure a description is kept
//! per thread and can be read with [`sr_last_error_message`]. Engines are
//! opaque handles created by [`sr_engine_new`] and released with
//! [`sr_engine_free`]. Model and result selectors are passed as `int32_t`
//! using the values of [`SrModel`] and [`SrResult`], so unknown values are
//! rejected instead of being undefined behaviour.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scorerate::models::{margin, ranking, wdl, win_loss};
use scorerate::{
    Engine, EngineConfig, EngineModel, Error, GameOutcome, GameRecord, Margin, ModelParams, PlayerId, Ranking,
    WdlResult, WinDrawLoss, WinLoss,
};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownPlayer = 3,
    ModelMismatch = 4,
    LogOrder = 5,
    DegenerateLikelihood = 6,
    SizeLimit = 7,
    Panic = 99,
}

/// Values accepted for `model` arguments.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrModel {
    WinLoss = 0,
    Margin = 1,
    WinDrawLoss = 2,
    Ranking = 3,
    EloClassic = 4,
}

/// Values accepted for `result` arguments, seen from player A.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrResult {
    AWins = 0,
    Draw = 1,
    BWins = 2,
}

/// Model parameters: scale `alpha`, draw threshold `delta`, step `k` and the
/// initial rating `r_init`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrParams {
    pub alpha: f64,
    pub delta: f64,
    pub k: f64,
    pub r_init: f64,
}

/// Opaque engine handle.
pub struct SrEngine {
    inner: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::UnknownPlayer(_) => SrStatus::UnknownPlayer,
            Error::ModelMismatch { .. } => SrStatus::ModelMismatch,
            Error::LogOrder { .. } => SrStatus::LogOrder,
            Error::DegenerateLikelihood(_) => SrStatus::DegenerateLikelihood,
            Error::SizeLimit(_) => SrStatus::SizeLimit,
            Error::Validation(_) | Error::Parse { .. } | Error::Io(_) => SrStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SrStatus::NullPointer, format!("`{what}` is NULL"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(SrStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SrStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            SrStatus::Panic
        }
    }
}

unsafe fn player<'a>(p: *const c_char, what: &str) -> Result<PlayerId, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("`{what}` is not UTF-8")))?;
    Ok(PlayerId::new(s)?)
}

unsafe fn players(ids: *const *const c_char, n: usize, what: &str) -> Result<Vec<PlayerId>, Failure> {
    if ids.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts(ids, n)
        .iter()
        .map(|&p| player(p, what))
        .collect()
}

fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: non-NULL and, per the caller contract, writable.
    unsafe { out.write(value) };
    Ok(())
}

fn model_from(code: i32) -> Result<EngineModel, Failure> {
    Ok(match code {
        x if x == SrModel::WinLoss as i32 => EngineModel::WinLoss,
        x if x == SrModel::Margin as i32 => EngineModel::Margin,
        x if x == SrModel::WinDrawLoss as i32 => EngineModel::WinDrawLoss,
        x if x == SrModel::Ranking as i32 => EngineModel::Ranking,
        x if x == SrModel::EloClassic as i32 => EngineModel::EloClassic,
        other => return Err(invalid(format!("unknown model code {other}"))),
    })
}

fn result_from(code: i32) -> Result<WdlResult, Failure> {
    Ok(match code {
        x if x == SrResult::AWins as i32 => WdlResult::AWins,
        x if x == SrResult::Draw as i32 => WdlResult::Draw,
        x if x == SrResult::BWins as i32 => WdlResult::BWins,
        other => return Err(invalid(format!("unknown result code {other}"))),
    })
}

fn params_from(p: &SrParams) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(p.alpha, p.delta, p.k, p.r_init)?)
}

/// Default parameters: alpha 1, delta 1, K 0.1, r_init 0.
#[no_mangle]
pub extern "C" fn sr_params_default() -> SrParams {
    let d = ModelParams::default();
    SrParams {
        alpha: d.alpha(),
        delta: d.delta(),
        k: d.k_factor(),
        r_init: d.r_init(),
    }
}

/// Parameters under which the win/loss model reproduces classical Elo.
#[no_mangle]
pub extern "C" fn sr_params_elo() -> SrParams {
    let d = ModelParams::elo_equivalent();
    SrParams {
        alpha: d.alpha(),
        delta: d.delta(),
        k: d.k_factor(),
        r_init: d.r_init(),
    }
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates an engine over the `n` players in `ids` (NUL-terminated UTF-8).
/// `params` may be NULL for the defaults.
///
/// # Safety
/// `ids` must point to `n` valid C strings, `params` must be NULL or valid,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_new(
    model: i32,
    params: *const SrParams,
    ids: *const *const c_char,
    n: usize,
    out: *mut *mut SrEngine,
) -> SrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = model_from(model)?;
        let params = if params.is_null() {
            ModelParams::default()
        } else {
            params_from(&*params)?
        };
        let pool = players(ids, n, "ids")?;
        if pool.len() != pool.iter().collect::<std::collections::BTreeSet<_>>().len() {
            return Err(invalid("player ids must be distinct"));
        }
        let engine = Engine::new(EngineConfig::new(model, params, pool))?;
        write_out(out, Box::into_raw(Box::new(SrEngine { inner: engine })))
    })
}

/// Releases an engine; NULL is ignored.
///
/// # Safety
/// `engine` must be NULL or a handle from [`sr_engine_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_free(engine: *mut SrEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

unsafe fn engine_mut<'a>(engine: *mut SrEngine) -> Result<&'a mut SrEngine, Failure> {
    engine.as_mut().ok_or_else(|| null("engine"))
}

unsafe fn engine_ref<'a>(engine: *const SrEngine) -> Result<&'a SrEngine, Failure> {
    engine.as_ref().ok_or_else(|| null("engine"))
}

fn apply(engine: &mut SrEngine, t: u64, outcome: Result<GameOutcome, Error>) -> Result<(), Failure> {
    engine.inner.apply(&GameRecord::new(t, outcome?))?;
    Ok(())
}

/// Records a win of `winner` over `loser` at time index `t`.
///
/// # Safety
/// `engine` must be a live handle and the ids valid C strings.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_record_win_loss(
    engine: *mut SrEngine,
    t: u64,
    winner: *const c_char,
    loser: *const c_char,
) -> SrStatus {
    guard(|| {
        let e = engine_mut(engine)?;
        let o = WinLoss::new(player(winner, "winner")?, player(loser, "loser")?).map(Into::into);
        apply(e, t, o)
    })
}

/// Records a game with final points for both sides.
///
/// # Safety
/// `engine` must be a live handle and the ids valid C strings.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_record_margin(
    engine: *mut SrEngine,
    t: u64,
    player_a: *const c_char,
    points_a: u64,
    player_b: *const c_char,
    points_b: u64,
) -> SrStatus {
    guard(|| {
        let e = engine_mut(engine)?;
        let o = Margin::new(player(player_a, "player_a")?, points_a, player(player_b, "player_b")?, points_b)
            .map(Into::into);
        apply(e, t, o)
    })
}

/// Records a win, draw or loss of `player_a` against `player_b`.
///
/// # Safety
/// `engine` must be a live handle and the ids valid C strings.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_record_wdl(
    engine: *mut SrEngine,
    t: u64,
    player_a: *const c_char,
    player_b: *const c_char,
    result: i32,
) -> SrStatus {
    guard(|| {
        let e = engine_mut(engine)?;
        let o = WinDrawLoss::new(player(player_a, "player_a")?, player(player_b, "player_b")?, result_from(result)?)
            .map(Into::into);
        apply(e, t, o)
    })
}

/// Records a complete ranking of `m` players, best first.
///
/// # Safety
/// `engine` must be a live handle and `ranked` must point to `m` valid C strings.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_record_ranking(
    engine: *mut SrEngine,
    t: u64,
    ranked: *const *const c_char,
    m: usize,
) -> SrStatus {
    guard(|| {
        let e = engine_mut(engine)?;
        let order = players(ranked, m, "ranked")?;
        apply(e, t, Ranking::new(order).map(Into::into))
    })
}

/// Current rating of `id`.
///
/// # Safety
/// `engine` must be a live handle, `id` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_rating(engine: *const SrEngine, id: *const c_char, out: *mut f64) -> SrStatus {
    guard(|| {
        let e = engine_ref(engine)?;
        let id = player(id, "id")?;
        write_out(out, e.inner.ratings().require(id.as_str())?)
    })
}

/// Number of players in the pool.
///
/// # Safety
/// `engine` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_player_count(engine: *const SrEngine, out: *mut usize) -> SrStatus {
    guard(|| write_out(out, engine_ref(engine)?.inner.ratings().len()))
}

/// Number of games recorded so far.
///
/// # Safety
/// `engine` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sr_engine_games(engine: *const SrEngine, out: *mut usize) -> SrStatus {
    guard(|| write_out(out, engine_ref(engine)?.inner.history().len()))
}

fn finite(name: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("`{name}` must be finite")))
    }
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("`{name}` must be positive")))
    }
}

/// Score of the winner of a win/loss game, from `diff = r_winner - r_loser`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_win_loss_score(diff: f64, alpha: f64, out: *mut f64) -> SrStatus {
    guard(|| write_out(out, win_loss::winner_score(finite("diff", diff)?, positive("alpha", alpha)?)))
}

/// Score of player A when the point difference is `d`, from
/// `diff = r_a - r_b`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_margin_score(d: i64, diff: f64, alpha: f64, out: *mut f64) -> SrStatus {
    guard(|| {
        let alpha = positive("alpha", alpha)?;
        write_out(out, margin::score_a(d, alpha * finite("diff", diff)?, alpha))
    })
}

/// Score of player A for a win/draw/loss `result`, from `diff = r_a - r_b`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_wdl_score(result: i32, diff: f64, alpha: f64, delta: f64, out: *mut f64) -> SrStatus {
    guard(|| {
        let alpha = positive("alpha", alpha)?;
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(invalid("`delta` must be non-negative"));
        }
        let s = wdl::score_a(result_from(result)?, alpha * finite("diff", diff)?, delta, alpha)?;
        write_out(out, s)
    })
}

/// Scores of a ranking: `ratings` holds the `m` ratings in finishing order
/// (best first) and `out` receives the `m` scores in the same order.
///
/// # Safety
/// `ratings` must point to `m` readable values and `out` to `m` writable ones.
#[no_mangle]
pub unsafe extern "C" fn sr_ranking_scores(ratings: *const f64, m: usize, alpha: f64, out: *mut f64) -> SrStatus {
    guard(|| {
        if ratings.is_null() {
            return Err(null("ratings"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if m < 2 {
            return Err(invalid("a ranking needs at least 2 players"));
        }
        let alpha = positive("alpha", alpha)?;
        let r = std::slice::from_raw_parts(ratings, m);
        for &x in r {
            finite("ratings", x)?;
        }
        let scores = ranking::scores_ordered(r, alpha);
        std::slice::from_raw_parts_mut(out, m).copy_from_slice(&scores);
        Ok(())
    })
}
