use serde::{Deserialize, Serialize};

use super::IngestError;

pub const SUPPORTED_LANGUAGES: [&str; 5] = ["de", "en", "es", "fr", "it"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatePrecision {
    Year,
    Month,
    Day,
}

/// A proleptic Gregorian date as stored in the knowledge base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbDate {
    pub year: i64,
    pub month: u8,
    pub day: u8,
    pub precision: DatePrecision,
}

impl KbDate {
    pub fn day(year: i64, month: u8, day: u8) -> Self {
        KbDate {
            year,
            month,
            day,
            precision: DatePrecision::Day,
        }
    }

    pub fn month(year: i64, month: u8) -> Self {
        KbDate {
            year,
            month,
            day: 0,
            precision: DatePrecision::Month,
        }
    }

    pub fn year(year: i64) -> Self {
        KbDate {
            year,
            month: 0,
            day: 0,
            precision: DatePrecision::Year,
        }
    }

    /// Parses a knowledge-base timestamp such as `+1732-02-22T00:00:00Z`
    /// together with its numeric precision (9 = year, 10 = month, 11 = day).
    pub fn from_timestamp(time: &str, precision: u64) -> Option<Self> {
        let (negative, rest) = match time.as_bytes().first()? {
            b'+' => (false, &time[1..]),
            b'-' => (true, &time[1..]),
            _ => (false, time),
        };
        let date = rest.split('T').next()?;
        let mut parts = date.split('-');
        let year: i64 = parts.next()?.parse().ok()?;
        let month: u8 = parts.next()?.parse().ok()?;
        let day: u8 = parts.next()?.parse().ok()?;
        let year = if negative { -year } else { year };
        Some(match precision {
            11.. if (1..=12).contains(&month) && day >= 1 => KbDate::day(year, month, day),
            10.. if (1..=12).contains(&month) => KbDate::month(year, month),
            _ => KbDate::year(year),
        })
    }
}

const EN: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];
const FR: [&str; 12] = [
    "janvier",
    "février",
    "mars",
    "avril",
    "mai",
    "juin",
    "juillet",
    "août",
    "septembre",
    "octobre",
    "novembre",
    "décembre",
];
const DE: [&str; 12] = [
    "Januar",
    "Februar",
    "März",
    "April",
    "Mai",
    "Juni",
    "Juli",
    "August",
    "September",
    "Oktober",
    "November",
    "Dezember",
];
const ES: [&str; 12] = [
    "enero",
    "febrero",
    "marzo",
    "abril",
    "mayo",
    "junio",
    "julio",
    "agosto",
    "septiembre",
    "octubre",
    "noviembre",
    "diciembre",
];
const IT: [&str; 12] = [
    "gennaio",
    "febbraio",
    "marzo",
    "aprile",
    "maggio",
    "giugno",
    "luglio",
    "agosto",
    "settembre",
    "ottobre",
    "novembre",
    "dicembre",
];

fn year_text(year: i64, language: &str) -> String {
    if year > 0 {
        return year.to_string();
    }
    // year 0 is 1 BCE in the proleptic calendar
    let bce = 1 - year;
    match language {
        "fr" => format!("{bce} av. J.-C."),
        "de" => format!("{bce} v. Chr."),
        "es" => format!("{bce} a. C."),
        "it" => format!("{bce} a.C."),
        _ => format!("{bce} BC"),
    }
}

/// Renders a date the way encyclopedia prose in `language` writes it,
/// e.g. `22 février 1732`.
pub fn localize_date(date: &KbDate, language: &str) -> Result<String, IngestError> {
    let months = match language {
        "en" => &EN,
        "fr" => &FR,
        "de" => &DE,
        "es" => &ES,
        "it" => &IT,
        _ => {
            return Err(IngestError::UnsupportedLanguage {
                language: language.to_string(),
                supported: SUPPORTED_LANGUAGES.to_vec(),
            })
        }
    };
    let year = year_text(date.year, language);
    let month = || months[usize::from(date.month.clamp(1, 12)) - 1];
    Ok(match date.precision {
        DatePrecision::Year => year,
        DatePrecision::Month => match language {
            "es" => format!("{} de {year}", month()),
            _ => format!("{} {year}", month()),
        },
        DatePrecision::Day => match language {
            "fr" if date.day == 1 => format!("1er {} {year}", month()),
            "de" => format!("{}. {} {year}", date.day, month()),
            "es" => format!("{} de {} de {year}", date.day, month()),
            _ => format!("{} {} {year}", date.day, month()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn french_and_english() {
        let d = KbDate::day(1732, 2, 22);
        assert_eq!(localize_date(&d, "fr").unwrap(), "22 février 1732");
        assert_eq!(localize_date(&d, "en").unwrap(), "22 February 1732");
    }

    #[test]
    fn precision_fallbacks() {
        assert_eq!(localize_date(&KbDate::year(1732), "fr").unwrap(), "1732");
        assert_eq!(
            localize_date(&KbDate::month(1732, 8), "fr").unwrap(),
            "août 1732"
        );
        assert_eq!(
            localize_date(&KbDate::day(1412, 1, 1), "fr").unwrap(),
            "1er janvier 1412"
        );
        assert_eq!(
            localize_date(&KbDate::year(-51), "fr").unwrap(),
            "52 av. J.-C."
        );
    }

    #[test]
    fn unsupported() {
        let err = localize_date(&KbDate::year(1), "tlh").unwrap_err();
        assert!(matches!(err, IngestError::UnsupportedLanguage { .. }));
    }

    #[test]
    fn timestamps() {
        assert_eq!(
            KbDate::from_timestamp("+1732-02-22T00:00:00Z", 11),
            Some(KbDate::day(1732, 2, 22))
        );
        assert_eq!(
            KbDate::from_timestamp("+1412-00-00T00:00:00Z", 9),
            Some(KbDate::year(1412))
        );
        assert_eq!(
            KbDate::from_timestamp("+1801-03-00T00:00:00Z", 10),
            Some(KbDate::month(1801, 3))
        );
        assert_eq!(KbDate::from_timestamp("garbage", 11), None);
    }
}
