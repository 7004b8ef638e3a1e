//! Plain-text game logs.
//!
//! ```text
//! #model=win_loss
//! 1,alice,bob
//! 2,carol,alice
//! ```
//!
//! Later `#` lines are comments and blank lines are skipped. Record schemas:
//!
//! | model           | record                                   |
//! |-----------------|------------------------------------------|
//! | `win_loss`      | `t,winner,loser`                         |
//! | `margin`        | `t,player_a,points_a,player_b,points_b`  |
//! | `win_draw_loss` | `t,player_a,player_b,A\|D\|B`            |
//! | `ranking`       | `t,first>second>...>last`                |
//!
//! Time indices must be strictly increasing.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::models::OutcomeModel;
use crate::types::{GameOutcome, GameRecord, Margin, PlayerId, Ranking, WdlResult, WinDrawLoss, WinLoss};

const HEADER_PREFIX: &str = "#model=";

/// A parsed log plus the source line of each record.
#[derive(Debug, Clone, PartialEq)]
pub struct GameLog {
    pub model: OutcomeModel,
    pub records: Vec<GameRecord>,
    pub lines: Vec<usize>,
}

impl GameLog {
    /// Every player that appears in some record.
    pub fn players(&self) -> BTreeSet<PlayerId> {
        self.records
            .iter()
            .flat_map(|r| r.outcome.participants())
            .cloned()
            .collect()
    }

    /// Source line of record `index`, if any.
    pub fn line_of(&self, index: usize) -> Option<usize> {
        self.lines.get(index).copied()
    }
}

fn player(line: usize, field: &str, raw: &str) -> Result<PlayerId> {
    PlayerId::new(raw.trim()).map_err(|e| Error::parse(line, field, e.to_string()))
}

fn points(line: usize, field: &str, raw: &str) -> Result<u64> {
    raw.trim()
        .parse()
        .map_err(|_| Error::parse(line, field, format!("`{}` is not a non-negative integer", raw.trim())))
}

fn expect_fields<'a>(line: usize, text: &'a str, names: &[&str]) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = text.split(',').collect();
    if fields.len() != names.len() {
        return Err(Error::parse(
            line,
            names.get(fields.len()).copied().unwrap_or("record"),
            format!("expected {} fields ({}), found {}", names.len(), names.join(","), fields.len()),
        ));
    }
    Ok(fields)
}

fn parse_record(model: OutcomeModel, line: usize, text: &str) -> Result<GameRecord> {
    let wrap = |field: &str, r: Result<GameOutcome>| r.map_err(|e| Error::parse(line, field, e.to_string()));
    let (t_raw, outcome) = match model {
        OutcomeModel::WinLoss => {
            let f = expect_fields(line, text, &["t", "winner", "loser"])?;
            let o = WinLoss::new(player(line, "winner", f[1])?, player(line, "loser", f[2])?).map(Into::into);
            (f[0], wrap("loser", o)?)
        }
        OutcomeModel::Margin => {
            let f = expect_fields(line, text, &["t", "player_a", "points_a", "player_b", "points_b"])?;
            let o = Margin::new(
                player(line, "player_a", f[1])?,
                points(line, "points_a", f[2])?,
                player(line, "player_b", f[3])?,
                points(line, "points_b", f[4])?,
            )
            .map(Into::into);
            (f[0], wrap("player_b", o)?)
        }
        OutcomeModel::WinDrawLoss => {
            let f = expect_fields(line, text, &["t", "player_a", "player_b", "result"])?;
            let result = match f[3].trim() {
                "A" => WdlResult::AWins,
                "D" => WdlResult::Draw,
                "B" => WdlResult::BWins,
                other => return Err(Error::parse(line, "result", format!("`{other}` is not one of A, D, B"))),
            };
            let o = WinDrawLoss::new(player(line, "player_a", f[1])?, player(line, "player_b", f[2])?, result)
                .map(Into::into);
            (f[0], wrap("player_b", o)?)
        }
        OutcomeModel::Ranking => {
            let f = expect_fields(line, text, &["t", "ranking"])?;
            let order = f[1]
                .split('>')
                .map(|p| player(line, "ranking", p))
                .collect::<Result<Vec<_>>>()?;
            (f[0], wrap("ranking", Ranking::new(order).map(Into::into))?)
        }
    };
    let t = t_raw
        .trim()
        .parse::<u64>()
        .map_err(|_| Error::parse(line, "t", format!("`{}` is not a non-negative integer", t_raw.trim())))?;
    Ok(GameRecord::new(t, outcome))
}

/// Parses a whole log; errors name the 1-based line and the field.
pub fn parse_log<R: BufRead>(input: R) -> Result<GameLog> {
    let mut model = None;
    let mut records = Vec::new();
    let mut lines = Vec::new();
    let mut previous: Option<u64> = None;
    for (k, text) in input.lines().enumerate() {
        let line = k + 1;
        let text = text?;
        let text = text.trim();
        let Some(model) = model else {
            let name = text
                .strip_prefix(HEADER_PREFIX)
                .ok_or_else(|| Error::parse(line, "header", format!("first line must be `{HEADER_PREFIX}<name>`")))?;
            model = Some(
                name.parse::<OutcomeModel>()
                    .map_err(|e| Error::parse(line, "header", e.to_string()))?,
            );
            continue;
        };
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let record = parse_record(model, line, text)?;
        if let Some(prev) = previous {
            if record.time_index <= prev {
                return Err(Error::parse(
                    line,
                    "t",
                    format!("time index {} does not follow {prev}; indices must strictly increase", record.time_index),
                ));
            }
        }
        previous = Some(record.time_index);
        records.push(record);
        lines.push(line);
    }
    let model = model.ok_or_else(|| Error::parse(1, "header", "empty log: missing `#model=` header"))?;
    Ok(GameLog { model, records, lines })
}

fn record_line(record: &GameRecord) -> String {
    let t = record.time_index;
    match &record.outcome {
        GameOutcome::WinLoss(o) => format!("{t},{},{}", o.winner(), o.loser()),
        GameOutcome::Margin(o) => format!("{t},{},{},{},{}", o.player_a(), o.points_a(), o.player_b(), o.points_b()),
        GameOutcome::WinDrawLoss(o) => {
            let r = match o.result() {
                WdlResult::AWins => "A",
                WdlResult::Draw => "D",
                WdlResult::BWins => "B",
            };
            format!("{t},{},{},{r}", o.player_a(), o.player_b())
        }
        GameOutcome::Ranking(o) => {
            let order: Vec<&str> = o.ranked().iter().map(PlayerId::as_str).collect();
            format!("{t},{}", order.join(">"))
        }
    }
}

/// Writes `records` in the format read by [`parse_log`].
pub fn write_log<W: Write>(mut out: W, model: OutcomeModel, records: &[GameRecord]) -> Result<()> {
    writeln!(out, "{HEADER_PREFIX}{}", model.name())?;
    for record in records {
        if !model.accepts(&record.outcome) {
            return Err(model.mismatch(&record.outcome));
        }
        writeln!(out, "{}", record_line(record))?;
    }
    out.flush()?;
    Ok(())
}

/// One player id per line; blank lines and `#` comments are ignored.
pub fn parse_pool<R: BufRead>(input: R) -> Result<BTreeSet<PlayerId>> {
    let mut pool = BTreeSet::new();
    for (k, text) in input.lines().enumerate() {
        let text = text?;
        let text = text.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let id = player(k + 1, "player", text)?;
        if !pool.insert(id) {
            return Err(Error::parse(k + 1, "player", format!("duplicate player `{text}`")));
        }
    }
    Ok(pool)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<GameLog> {
        parse_log(text.as_bytes())
    }

    #[test]
    fn parses_every_schema() {
        let log = parse("#model=win_loss\n1,a,b\n\n# comment\n3, b , c\n").unwrap();
        assert_eq!(log.records.len(), 2);
        assert_eq!(log.lines, vec![2, 5]);
        assert_eq!(log.players().len(), 3);

        let log = parse("#model=margin\n1,a,3,b,1\n").unwrap();
        let GameOutcome::Margin(m) = &log.records[0].outcome else { panic!() };
        assert_eq!(m.difference(), 2);

        let log = parse("#model=win_draw_loss\n1,a,b,D\n2,a,b,B\n").unwrap();
        assert_eq!(log.records.len(), 2);

        let log = parse("#model=ranking\n4,c>a>b\n").unwrap();
        let GameOutcome::Ranking(r) = &log.records[0].outcome else { panic!() };
        assert_eq!(r.rank_of("c"), Some(1));
    }

    #[test]
    fn errors_name_line_and_field() {
        let err = parse("#model=win_loss\n1,a,b\n2,a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, ref field, .. } if field == "loser"), "{err}");

        let err = parse("#model=margin\n1,a,x,b,1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, ref field, .. } if field == "points_a"), "{err}");

        let err = parse("#model=win_draw_loss\n1,a,b,W\n").unwrap_err();
        assert!(matches!(err, Error::Parse { ref field, .. } if field == "result"));

        let err = parse("#model=win_loss\n1,a,a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));

        let err = parse("1,a,b\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, ref field, .. } if field == "header"));

        assert!(parse("").is_err());
        assert!(parse("#model=chess\n").is_err());
    }

    #[test]
    fn decreasing_time_cites_line() {
        let err = parse("#model=win_loss\n5,a,b\n5,b,a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, ref field, .. } if field == "t"), "{err}");
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn write_then_parse_round_trips() {
        let text = "#model=ranking\n1,a>b>c\n2,c>b\n";
        let log = parse(text).unwrap();
        let mut out = Vec::new();
        write_log(&mut out, log.model, &log.records).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn writer_rejects_foreign_outcomes() {
        let log = parse("#model=win_loss\n1,a,b\n").unwrap();
        assert!(write_log(Vec::new(), OutcomeModel::Margin, &log.records).is_err());
    }

    #[test]
    fn pool_file() {
        let pool = parse_pool("# pool\nA\n\nB\n".as_bytes()).unwrap();
        assert_eq!(pool.len(), 2);
        assert!(parse_pool("A\nA\n".as_bytes()).is_err());
    }
}
