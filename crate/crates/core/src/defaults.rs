//! Shipped default tables and vocabularies.
//!
//! Everything here is data a deployment would normally curate for its own
//! corpus: the alias table, the employer-to-industry map, the snippet
//! extraction patterns, the per-site path specs, and the vocabularies behind
//! the synthetic benchmark generator. Keeping them in one module makes the
//! bundled configuration easy to audit and to export (`incomeverify synth`
//! writes the table files next to the generated data).

use crate::canon::{AliasKind, AliasTable};
use crate::extract::pattern::PatternDef;
use crate::extract::wrapper::PathSpecs;
use crate::industry::{Industry, IndustryTable};

/// Employer/title alias table: every alias the vocabularies know about, the
/// published example rows with spacing variants, and token-level abbreviation
/// expansions for coverage beyond the listed strings.
pub fn alias_table() -> AliasTable {
    let mut t = AliasTable::new();
    for e in EMPLOYERS {
        for alias in e.aliases {
            t.insert(AliasKind::Employer, alias, e.name);
        }
    }
    for title in TITLES {
        for alias in title.aliases {
            t.insert(AliasKind::Title, alias, title.name);
        }
    }
    // Spacing/punctuation variants beyond the vocab alias lists.
    for raw in ["U S P S", "U.S. Postal Service"] {
        t.insert(AliasKind::Employer, raw, "United States Postal Service");
    }
    t.insert(AliasKind::Employer, "G E", "General Electric");
    t.insert(AliasKind::Employer, "U.S. Government", "United States Government");
    t.insert(AliasKind::Title, "Acc. Manager", "Account Manager");
    t.insert(AliasKind::Title, "Snr. Manager", "Senior Manager");
    // Token-level abbreviation expansions, applied before whole-string lookup.
    for (token, replacement) in [
        ("sr", "Senior"),
        ("snr", "Senior"),
        ("jr", "Junior"),
        ("acc", "Account"),
        ("mgr", "Manager"),
        ("engr", "Engineer"),
        ("asst", "Assistant"),
        ("assoc", "Associate"),
        ("admin", "Administrative"),
        ("rep", "Representative"),
        ("dir", "Director"),
    ] {
        t.insert_token(AliasKind::Title, token, replacement);
    }
    t.validate().expect("shipped alias table is idempotent");
    t
}

/// One synthetic-world employer: canonical name, industry, log-income effect,
/// and the surface aliases the input-noise model may substitute.
pub struct EmployerEntry {
    pub name: &'static str,
    pub industry: Industry,
    pub ln_mult: f64,
    pub aliases: &'static [&'static str],
}

pub const EMPLOYERS: &[EmployerEntry] = &[
    // Government
    EmployerEntry { name: "United States Postal Service", industry: Industry::Government, ln_mult: -0.195, aliases: &["USPS", "U.S.P.S", "US Postal Service"] },
    EmployerEntry { name: "United States Government", industry: Industry::Government, ln_mult: -0.065, aliases: &["US Government"] },
    EmployerEntry { name: "Department of Homeland Security", industry: Industry::Government, ln_mult: 0.000, aliases: &["DHS"] },
    EmployerEntry { name: "Department of Agriculture", industry: Industry::Government, ln_mult: -0.130, aliases: &["USDA"] },
    EmployerEntry { name: "Department of Energy", industry: Industry::Government, ln_mult: 0.065, aliases: &["DOE"] },
    EmployerEntry { name: "Department of Transportation", industry: Industry::Government, ln_mult: -0.065, aliases: &["DOT"] },
    EmployerEntry { name: "Federal Aviation Administration", industry: Industry::Government, ln_mult: 0.065, aliases: &["FAA"] },
    EmployerEntry { name: "Bureau of Labor Statistics", industry: Industry::Government, ln_mult: 0.000, aliases: &["BLS"] },
    // Technology
    EmployerEntry { name: "Cloudmesh Systems", industry: Industry::Technology, ln_mult: 0.455, aliases: &["Cloudmesh"] },
    EmployerEntry { name: "Bitwise Labs", industry: Industry::Technology, ln_mult: 0.520, aliases: &[] },
    EmployerEntry { name: "Quantum Harbor Software", industry: Industry::Technology, ln_mult: 0.390, aliases: &["Quantum Harbor"] },
    EmployerEntry { name: "Nimbus Analytics", industry: Industry::Technology, ln_mult: 0.364, aliases: &[] },
    EmployerEntry { name: "Vertex Data Systems", industry: Industry::Technology, ln_mult: 0.416, aliases: &["Vertex Data"] },
    EmployerEntry { name: "Octagon Technologies", industry: Industry::Technology, ln_mult: 0.286, aliases: &["Octagon Tech"] },
    // Manufacturing
    EmployerEntry { name: "General Electric", industry: Industry::Manufacturing, ln_mult: 0.130, aliases: &["GE", "G.E"] },
    EmployerEntry { name: "Ironclad Manufacturing", industry: Industry::Manufacturing, ln_mult: 0.000, aliases: &["Ironclad Mfg"] },
    EmployerEntry { name: "Precision Gear Works", industry: Industry::Manufacturing, ln_mult: -0.065, aliases: &[] },
    EmployerEntry { name: "Lakeside Steel", industry: Industry::Manufacturing, ln_mult: -0.026, aliases: &[] },
    // Finance
    EmployerEntry { name: "Meridian Capital Group", industry: Industry::Finance, ln_mult: 0.585, aliases: &["Meridian Capital"] },
    EmployerEntry { name: "Harbor Trust Bank", industry: Industry::Finance, ln_mult: 0.390, aliases: &["Harbor Trust"] },
    EmployerEntry { name: "Summit Lending Partners", industry: Industry::Finance, ln_mult: 0.325, aliases: &["Summit Lending"] },
    EmployerEntry { name: "Beacon Insurance Group", industry: Industry::Finance, ln_mult: 0.234, aliases: &["Beacon Insurance"] },
    // Healthcare
    EmployerEntry { name: "Lakeview Medical Center", industry: Industry::Healthcare, ln_mult: 0.156, aliases: &["Lakeview Medical"] },
    EmployerEntry { name: "Riverside Health Partners", industry: Industry::Healthcare, ln_mult: 0.104, aliases: &["Riverside Health"] },
    EmployerEntry { name: "CarePoint Clinics", industry: Industry::Healthcare, ln_mult: 0.000, aliases: &["CarePoint"] },
    // Retail
    EmployerEntry { name: "Valuemart Stores", industry: Industry::Retail, ln_mult: -0.455, aliases: &["Valuemart"] },
    EmployerEntry { name: "Parkside Grocers", industry: Industry::Retail, ln_mult: -0.520, aliases: &[] },
    EmployerEntry { name: "Urban Outpost Retail", industry: Industry::Retail, ln_mult: -0.364, aliases: &["Urban Outpost"] },
    // Travel
    EmployerEntry { name: "Wanderlust Travel Group", industry: Industry::Travel, ln_mult: -0.195, aliases: &["Wanderlust Travel"] },
    EmployerEntry { name: "Skyline Airways", industry: Industry::Travel, ln_mult: 0.065, aliases: &[] },
    EmployerEntry { name: "Harborview Hotels", industry: Industry::Travel, ln_mult: -0.286, aliases: &[] },
    // Energy
    EmployerEntry { name: "Gulf Coast Energy", industry: Industry::Energy, ln_mult: 0.325, aliases: &["Gulf Coast"] },
    EmployerEntry { name: "Windward Power", industry: Industry::Energy, ln_mult: 0.195, aliases: &[] },
    // Education
    EmployerEntry { name: "Brightfield University", industry: Industry::Education, ln_mult: -0.130, aliases: &["Brightfield U"] },
    EmployerEntry { name: "Cedar Valley College", industry: Industry::Education, ln_mult: -0.234, aliases: &["Cedar Valley"] },
    // Logistics
    EmployerEntry { name: "Translink Freight", industry: Industry::Logistics, ln_mult: -0.104, aliases: &["Translink"] },
    EmployerEntry { name: "Bluebird Logistics", industry: Industry::Logistics, ln_mult: -0.156, aliases: &[] },
    // Media
    EmployerEntry { name: "Morning Herald Media", industry: Industry::Media, ln_mult: -0.065, aliases: &["Morning Herald"] },
    EmployerEntry { name: "Castlight Studios", industry: Industry::Media, ln_mult: 0.026, aliases: &[] },
    // Construction
    EmployerEntry { name: "Stonebridge Construction", industry: Industry::Construction, ln_mult: 0.000, aliases: &["Stonebridge"] },
    EmployerEntry { name: "Ridgeline Builders", industry: Industry::Construction, ln_mult: -0.065, aliases: &[] },
];

/// One synthetic-world job title: canonical name, log-income effect, aliases.
pub struct TitleEntry {
    pub name: &'static str,
    pub ln_mult: f64,
    pub aliases: &'static [&'static str],
}

pub const TITLES: &[TitleEntry] = &[
    TitleEntry { name: "Software Engineer", ln_mult: 0.540, aliases: &["Software Engr", "SW Engineer"] },
    TitleEntry { name: "Senior Software Engineer", ln_mult: 0.960, aliases: &["Sr. Software Engineer"] },
    TitleEntry { name: "Data Scientist", ln_mult: 0.660, aliases: &[] },
    TitleEntry { name: "Data Analyst", ln_mult: 0.120, aliases: &[] },
    TitleEntry { name: "Web Developer", ln_mult: 0.300, aliases: &[] },
    TitleEntry { name: "Account Manager", ln_mult: 0.144, aliases: &["Acc. Manager"] },
    TitleEntry { name: "Senior Manager", ln_mult: 0.660, aliases: &["Sr. Manager", "Snr. Manager"] },
    TitleEntry { name: "Project Manager", ln_mult: 0.336, aliases: &["Project Mgr"] },
    TitleEntry { name: "Store Manager", ln_mult: -0.180, aliases: &["Store Mgr"] },
    TitleEntry { name: "Medical Technologist", ln_mult: 0.060, aliases: &[] },
    TitleEntry { name: "Registered Nurse", ln_mult: 0.216, aliases: &["RN"] },
    TitleEntry { name: "Pharmacist", ln_mult: 0.600, aliases: &[] },
    TitleEntry { name: "General Engineering", ln_mult: 0.180, aliases: &[] },
    TitleEntry { name: "Mechanical Engineer", ln_mult: 0.300, aliases: &["Mechanical Engr"] },
    TitleEntry { name: "Electrical Engineer", ln_mult: 0.360, aliases: &["Electrical Engr"] },
    TitleEntry { name: "Civil Engineer", ln_mult: 0.336, aliases: &["Civil Engr"] },
    TitleEntry { name: "Accountant", ln_mult: 0.060, aliases: &[] },
    TitleEntry { name: "Senior Accountant", ln_mult: 0.420, aliases: &["Sr. Accountant"] },
    TitleEntry { name: "Financial Analyst", ln_mult: 0.360, aliases: &[] },
    TitleEntry { name: "Attorney", ln_mult: 0.780, aliases: &[] },
    TitleEntry { name: "Paralegal", ln_mult: -0.180, aliases: &[] },
    TitleEntry { name: "Teacher", ln_mult: -0.420, aliases: &[] },
    TitleEntry { name: "Professor", ln_mult: 0.180, aliases: &[] },
    TitleEntry { name: "Chef", ln_mult: -0.540, aliases: &[] },
    TitleEntry { name: "Line Cook", ln_mult: -0.900, aliases: &[] },
    TitleEntry { name: "Retail Associate", ln_mult: -1.020, aliases: &["Retail Assoc"] },
    TitleEntry { name: "Truck Driver", ln_mult: -0.480, aliases: &[] },
    TitleEntry { name: "Warehouse Supervisor", ln_mult: -0.360, aliases: &[] },
    TitleEntry { name: "Customer Service Representative", ln_mult: -0.720, aliases: &["Customer Service Rep", "CSR"] },
    TitleEntry { name: "Administrative Assistant", ln_mult: -0.600, aliases: &["Admin Asst"] },
    TitleEntry { name: "Marketing Specialist", ln_mult: -0.060, aliases: &[] },
    TitleEntry { name: "Sales Representative", ln_mult: -0.240, aliases: &["Sales Rep"] },
    TitleEntry { name: "Office Clerk", ln_mult: -0.780, aliases: &[] },
    TitleEntry { name: "Security Guard", ln_mult: -0.840, aliases: &[] },
    TitleEntry { name: "Electrician", ln_mult: -0.120, aliases: &[] },
    TitleEntry { name: "Plumber", ln_mult: -0.144, aliases: &[] },
    TitleEntry { name: "Carpenter", ln_mult: -0.300, aliases: &[] },
    TitleEntry { name: "Flight Attendant", ln_mult: -0.420, aliases: &[] },
    TitleEntry { name: "Pilot", ln_mult: 0.720, aliases: &[] },
    TitleEntry { name: "Janitor", ln_mult: -0.960, aliases: &[] },
];

/// States used by the synthetic world: code, log-income effect, two cities
/// with a fixed zip each.
pub struct StateEntry {
    pub code: &'static str,
    pub ln_mult: f64,
    pub cities: [(&'static str, &'static str); 2],
}

pub const STATES: &[StateEntry] = &[
    StateEntry { code: "CA", ln_mult: 0.392, cities: [("San Francisco", "94103"), ("Los Angeles", "90012")] },
    StateEntry { code: "NY", ln_mult: 0.350, cities: [("New York", "10001"), ("Buffalo", "14201")] },
    StateEntry { code: "WA", ln_mult: 0.280, cities: [("Seattle", "98101"), ("Spokane", "99201")] },
    StateEntry { code: "MA", ln_mult: 0.252, cities: [("Boston", "02108"), ("Worcester", "01602")] },
    StateEntry { code: "TX", ln_mult: 0.028, cities: [("Austin", "78701"), ("Houston", "77002")] },
    StateEntry { code: "IL", ln_mult: 0.000, cities: [("Chicago", "60601"), ("Springfield", "62701")] },
    StateEntry { code: "CO", ln_mult: 0.070, cities: [("Denver", "80202"), ("Boulder", "80302")] },
    StateEntry { code: "GA", ln_mult: -0.070, cities: [("Atlanta", "30303"), ("Savannah", "31401")] },
    StateEntry { code: "OH", ln_mult: -0.168, cities: [("Columbus", "43215"), ("Cleveland", "44113")] },
    StateEntry { code: "FL", ln_mult: -0.112, cities: [("Miami", "33128"), ("Tampa", "33602")] },
    StateEntry { code: "NC", ln_mult: -0.140, cities: [("Charlotte", "28202"), ("Raleigh", "27601")] },
    StateEntry { code: "IA", ln_mult: -0.308, cities: [("Des Moines", "50309"), ("Ames", "50010")] },
];

pub const FIRST_NAMES: &[&str] = &[
    "James", "Mary", "Robert", "Patricia", "John", "Jennifer", "Michael", "Linda", "David",
    "Elizabeth", "William", "Barbara", "Richard", "Susan", "Joseph", "Jessica", "Thomas",
    "Sarah", "Charles", "Karen", "Christopher", "Nancy", "Daniel", "Lisa", "Matthew", "Betty",
    "Anthony", "Margaret", "Mark", "Sandra",
];

pub const LAST_NAMES: &[&str] = &[
    "Smith", "Johnson", "Williams", "Brown", "Jones", "Garcia", "Miller", "Davis", "Rodriguez",
    "Martinez", "Hernandez", "Lopez", "Gonzalez", "Wilson", "Anderson", "Thomas", "Taylor",
    "Moore", "Jackson", "Martin", "Lee", "Perez", "Thompson", "White", "Harris", "Sanchez",
    "Clark", "Ramirez", "Lewis", "Robinson",
];

pub const STREET_NAMES: &[&str] = &[
    "Oak", "Maple", "Cedar", "Pine", "Elm", "Washington", "Lake", "Hill", "Sunset", "River",
    "Park", "Main", "Church", "High", "Mill",
];

pub const STREET_SUFFIXES: &[&str] = &["St", "Ave", "Rd", "Blvd", "Ln", "Dr"];

/// Employer-to-industry table covering the synthetic world.
pub fn industry_table() -> IndustryTable {
    let mut t = IndustryTable::new();
    for e in EMPLOYERS {
        t.insert(e.name, e.industry);
    }
    t
}

/// Shipped snippet extraction patterns, in priority order.
pub fn pattern_defs() -> Vec<PatternDef> {
    let title = r"(?P<title>[A-Z][A-Za-z]*(?:\s+[A-Z][A-Za-z]*)*)";
    let employer = r"(?P<employer>[A-Z][A-Za-z0-9&.']*(?:\s+[A-Z][A-Za-z0-9&.']*)*)";
    let money = |group: &str| format!(r"(?P<{group}>\$?[0-9][0-9,]*(?:\.[0-9]{{1,2}})?)");
    let mk = |name: &str, pattern: String, captures: &[(&str, &str)]| PatternDef {
        name: name.to_string(),
        pattern,
        captures: captures
            .iter()
            .map(|(a, g)| (a.to_string(), g.to_string()))
            .collect(),
    };
    vec![
        mk(
            "average_salary_at_employer",
            format!(
                r"[Aa]verage\s+{title}\s+salary\s+at\s+{employer}\s+is\s+{}",
                money("money")
            ),
            &[("base_median", "money"), ("occupation", "title"), ("employer", "employer")],
        ),
        mk(
            "average_salary",
            format!(r"[Aa]verage\s+{title}\s+salary\s+is\s+{}", money("money")),
            &[("base_median", "money"), ("occupation", "title")],
        ),
        mk(
            "titled_salary_range",
            format!(
                r"{title}\s+salaries\s+at\s+{employer}\s+range\s+from\s+{}\s+to\s+{}",
                money("low"),
                money("high")
            ),
            &[
                ("base_low", "low"),
                ("base_high", "high"),
                ("occupation", "title"),
                ("employer", "employer"),
            ],
        ),
        mk(
            "total_compensation",
            format!(
                r"[Tt]otal\s+compensation\s+for\s+an?\s+{title}\s+(?:at\s+{employer}\s+)?is\s+{}",
                money("money")
            ),
            &[("total_median", "money"), ("occupation", "title"), ("employer", "employer")],
        ),
        mk(
            "salary_range_from_to",
            format!(
                r"(?:range[sd]?\s+from|[Ff]rom|between)\s+{}\s+(?:to|and)\s+{}",
                money("low"),
                money("high")
            ),
            &[("base_low", "low"), ("base_high", "high")],
        ),
        mk(
            "bare_dollar_range",
            format!(r"{}\s*[-\u{{2013}}]\s*{}", money("low"), money("high")),
            &[("base_low", "low"), ("base_high", "high")],
        ),
    ]
}

pub fn pattern_set() -> crate::extract::pattern::PatternSet {
    crate::extract::pattern::PatternSet::compile(pattern_defs())
        .expect("shipped patterns compile")
}

/// Per-site wrapper paths for the synthetic salary sites. Each site exposes a
/// different document shape; the central "mean"/"avg" column of a site maps
/// into the median attribute slot.
pub fn path_specs() -> PathSpecs {
    let mut specs = PathSpecs::default();
    let mut paylevels = std::collections::BTreeMap::new();
    for (attr, path) in [
        ("base_low", "compensation/base_salary/min"),
        ("base_median", "compensation/base_salary/mean"),
        ("base_high", "compensation/base_salary/max"),
        ("total_low", "compensation/total_compensation/min"),
        ("total_median", "compensation/total_compensation/mean"),
        ("total_high", "compensation/total_compensation/max"),
        ("occupation", "position/title"),
        ("employer", "position/employer"),
        ("city", "position/location/city"),
        ("state", "position/location/state"),
        ("zip", "position/location/zip"),
        ("country", "position/location/country"),
    ] {
        paylevels.insert(attr.to_string(), path.to_string());
    }
    specs.sites.insert("paylevels".to_string(), paylevels);

    let mut salarystats = std::collections::BTreeMap::new();
    for (attr, path) in [
        ("base_low", "pay/base/p10"),
        ("base_median", "pay/base/avg"),
        ("base_high", "pay/base/p90"),
        ("total_low", "pay/total/p10"),
        ("total_median", "pay/total/avg"),
        ("total_high", "pay/total/p90"),
        ("occupation", "job/name"),
        ("employer", "job/company"),
        ("city", "job/city"),
        ("state", "job/state"),
        ("zip", "job/zip"),
        ("country", "job/country"),
    ] {
        salarystats.insert(attr.to_string(), path.to_string());
    }
    specs.sites.insert("salarystats".to_string(), salarystats);
    specs
}
