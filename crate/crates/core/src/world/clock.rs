//! In-game calendar. Minute 0 is 6:00 AM; minute 1200 is 2:00 AM the next
//! calendar day, which is where the day forcibly ends.

use serde::{Deserialize, Serialize};
use std::fmt;

pub const DAY_MINUTES: u32 = 1200;
pub const MIDNIGHT: u32 = 1080;
pub const DAYS_PER_SEASON: u32 = 28;
pub const MINUTES_PER_TICK: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Season {
    Spring,
    Summer,
    Fall,
    Winter,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Spring, Season::Summer, Season::Fall, Season::Winter];

    pub fn index(self) -> u32 {
        self as u32
    }

    pub fn name(self) -> &'static str {
        match self {
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Fall => "fall",
            Season::Winter => "winter",
        }
    }

    pub fn parse(s: &str) -> Option<Season> {
        Season::ALL.into_iter().find(|x| x.name().eq_ignore_ascii_case(s.trim()))
    }

    /// Following season, and whether the year wrapped.
    pub fn next(self) -> (Season, bool) {
        match self {
            Season::Spring => (Season::Summer, false),
            Season::Summer => (Season::Fall, false),
            Season::Fall => (Season::Winter, false),
            Season::Winter => (Season::Spring, true),
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameClock {
    pub minutes_since_6am: u32,
    pub day_of_season: u32,
    pub season: Season,
    pub year: u32,
}

impl Default for GameClock {
    fn default() -> Self {
        GameClock::new(1, Season::Spring, 1)
    }
}

impl GameClock {
    pub fn new(day_of_season: u32, season: Season, year: u32) -> GameClock {
        GameClock {
            minutes_since_6am: 0,
            day_of_season,
            season,
            year,
        }
    }

    /// Military-style time the way the simulator APIs take it: 600..=2600.
    pub fn hhmm(&self) -> u32 {
        minutes_to_hhmm(self.minutes_since_6am)
    }

    pub fn time_string(&self) -> String {
        format_time(self.minutes_since_6am)
    }

    /// Days since spring 1 of year 1.
    pub fn day_index(&self) -> u32 {
        (self.year - 1) * 4 * DAYS_PER_SEASON + self.season.index() * DAYS_PER_SEASON + self.day_of_season - 1
    }

    pub fn absolute_minutes(&self) -> u64 {
        self.day_index() as u64 * DAY_MINUTES as u64 + self.minutes_since_6am as u64
    }

    pub fn is_after_midnight(&self) -> bool {
        self.minutes_since_6am > MIDNIGHT
    }

    /// Roll to 6:00 AM of the next day, carrying into season and year.
    pub fn next_day(&mut self) {
        self.minutes_since_6am = 0;
        self.day_of_season += 1;
        if self.day_of_season > DAYS_PER_SEASON {
            self.day_of_season = 1;
            let (season, wrapped) = self.season.next();
            self.season = season;
            if wrapped {
                self.year += 1;
            }
        }
    }
}

pub fn minutes_to_hhmm(minutes: u32) -> u32 {
    let t = 360 + minutes;
    (t / 60) * 100 + t % 60
}

/// 600 -> 0, 2400 -> 1080, 2600 -> 1200. Rejects malformed minute fields and
/// anything outside the playable day.
pub fn hhmm_to_minutes(hhmm: i64) -> Option<u32> {
    if !(600..=2600).contains(&hhmm) || hhmm % 100 >= 60 {
        return None;
    }
    let total = (hhmm / 100) * 60 + hhmm % 100;
    Some((total - 360) as u32)
}

/// "hh:mm AM/PM".
pub fn format_time(minutes: u32) -> String {
    let t = 360 + minutes;
    let h24 = (t / 60) % 24;
    let m = t % 60;
    let (h12, half) = match h24 {
        0 => (12, "AM"),
        1..=11 => (h24, "AM"),
        12 => (12, "PM"),
        _ => (h24 - 12, "PM"),
    };
    format!("{h12:02}:{m:02} {half}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_day_bounds() {
        assert_eq!(format_time(0), "06:00 AM");
        assert_eq!(format_time(360), "12:00 PM");
        assert_eq!(format_time(MIDNIGHT), "12:00 AM");
        assert_eq!(format_time(1190), "01:50 AM");
        assert_eq!(format_time(DAY_MINUTES), "02:00 AM");
    }

    #[test]
    fn hhmm_conversions() {
        assert_eq!(hhmm_to_minutes(600), Some(0));
        assert_eq!(hhmm_to_minutes(900), Some(180));
        assert_eq!(hhmm_to_minutes(2400), Some(MIDNIGHT));
        assert_eq!(hhmm_to_minutes(2600), Some(DAY_MINUTES));
        assert_eq!(hhmm_to_minutes(2670), None);
        assert_eq!(hhmm_to_minutes(550), None);
        for m in 0..=DAY_MINUTES {
            assert_eq!(hhmm_to_minutes(minutes_to_hhmm(m) as i64), Some(m));
        }
    }

    #[test]
    fn season_rollover() {
        let mut c = GameClock::new(28, Season::Spring, 1);
        c.next_day();
        assert_eq!((c.day_of_season, c.season, c.year), (1, Season::Summer, 1));
        let mut c = GameClock::new(28, Season::Winter, 1);
        c.next_day();
        assert_eq!((c.day_of_season, c.season, c.year), (1, Season::Spring, 2));
    }
}
