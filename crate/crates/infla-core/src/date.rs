//! Calendar dates for panel indexing.
//!
//! Dates are plain `(year, month, day)` tuples parsed from ISO-8601 text.
//! Monthly data is normalized to the first day of the month, so ordering
//! and equality are uniform across frequencies.

use alloc::format;
use alloc::string::String;

use crate::error::{Error, Result};

/// Sampling frequency of a panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frequency {
    Monthly,
    Daily,
}

impl Frequency {
    pub fn as_str(&self) -> &'static str {
        match self {
            Frequency::Monthly => "monthly",
            Frequency::Daily => "daily",
        }
    }
}

impl core::str::FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monthly" => Ok(Frequency::Monthly),
            "daily" => Ok(Frequency::Daily),
            other => Err(Error::Invalid(format!(
                "unknown frequency '{other}' (expected 'monthly' or 'daily')"
            ))),
        }
    }
}

/// A calendar date normalized to `(year, month, day)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    pub year: i32,
    pub month: u8,
    pub day: u8,
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Result<Date> {
        if !(1..=12).contains(&month) {
            return Err(Error::Data(format!("month {month} out of range")));
        }
        let max_day = days_in_month(year, month);
        if day < 1 || day > max_day {
            return Err(Error::Data(format!(
                "day {day} out of range for {year}-{month:02}"
            )));
        }
        Ok(Date { year, month, day })
    }

    /// Parses `YYYY-MM-DD` or `YYYY-MM`; the monthly form maps to day 1.
    pub fn parse(s: &str) -> Result<Date> {
        let mut parts = s.trim().split('-');
        let year = parts
            .next()
            .filter(|p| p.len() == 4)
            .and_then(|p| p.parse::<i32>().ok())
            .ok_or_else(|| Error::Data(format!("cannot parse date '{s}'")))?;
        let month = parts
            .next()
            .filter(|p| p.len() == 2)
            .and_then(|p| p.parse::<u8>().ok())
            .ok_or_else(|| Error::Data(format!("cannot parse date '{s}'")))?;
        let day = match parts.next() {
            Some(p) if p.len() == 2 => p
                .parse::<u8>()
                .map_err(|_| Error::Data(format!("cannot parse date '{s}'")))?,
            Some(_) => return Err(Error::Data(format!("cannot parse date '{s}'"))),
            None => 1,
        };
        if parts.next().is_some() {
            return Err(Error::Data(format!("cannot parse date '{s}'")));
        }
        Date::new(year, month, day)
    }

    /// Renders the date in the panel's native form: `YYYY-MM` for monthly
    /// panels, `YYYY-MM-DD` otherwise.
    pub fn format_for(&self, frequency: Frequency) -> String {
        match frequency {
            Frequency::Monthly => format!("{:04}-{:02}", self.year, self.month),
            Frequency::Daily => format!("{:04}-{:02}-{:02}", self.year, self.month, self.day),
        }
    }

    /// The first day of the following month; used to step monthly grids.
    pub fn next_month(&self) -> Date {
        if self.month == 12 {
            Date { year: self.year + 1, month: 1, day: 1 }
        } else {
            Date { year: self.year, month: self.month + 1, day: 1 }
        }
    }

    /// The next calendar day.
    pub fn next_day(&self) -> Date {
        if self.day < days_in_month(self.year, self.month) {
            Date { year: self.year, month: self.month, day: self.day + 1 }
        } else {
            self.next_month()
        }
    }
}

impl core::fmt::Display for Date {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        _ => 28,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_iso_forms() {
        assert_eq!(Date::parse("2020-03-15").unwrap(), Date { year: 2020, month: 3, day: 15 });
        assert_eq!(Date::parse("2020-03").unwrap(), Date { year: 2020, month: 3, day: 1 });
    }

    #[test]
    fn rejects_malformed_dates() {
        for bad in ["2020", "2020-13", "2020-02-30", "20-01-01", "2020/01/01", "2020-1-1"] {
            assert!(Date::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn ordering_follows_calendar() {
        let a = Date::parse("1999-12-31").unwrap();
        let b = Date::parse("2000-01").unwrap();
        assert!(a < b);
    }

    #[test]
    fn leap_day_accepted_only_in_leap_years() {
        assert!(Date::parse("2020-02-29").is_ok());
        assert!(Date::parse("2021-02-29").is_err());
        assert!(Date::parse("1900-02-29").is_err());
        assert!(Date::parse("2000-02-29").is_ok());
    }

    #[test]
    fn steps_cross_month_and_year_ends() {
        let d = Date::parse("2020-12-31").unwrap();
        assert_eq!(d.next_day(), Date::parse("2021-01-01").unwrap());
        assert_eq!(d.next_month(), Date::parse("2021-01-01").unwrap());
    }
}
