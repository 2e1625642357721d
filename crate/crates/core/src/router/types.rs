use serde::{Deserialize, Serialize};

/// Informal task taxonomy used to derive routing complexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    SyntaxFix,
    Completion,
    Refactor,
    CrashAnalysis,
}

impl TaskKind {
    pub const ALL: [TaskKind; 4] = [
        TaskKind::SyntaxFix,
        TaskKind::Completion,
        TaskKind::Refactor,
        TaskKind::CrashAnalysis,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaskDescriptor {
    pub kind: TaskKind,
    pub files_touched: u32,
    pub cross_file_deps: u32,
    /// Prompt length in tokens.
    pub token_length: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Complexity {
    Low,
    Medium,
    High,
}

impl Complexity {
    pub const ALL: [Complexity; 3] = [Complexity::Low, Complexity::Medium, Complexity::High];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaskFeatures {
    pub complexity: Complexity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceClass {
    CpuOnly,
    Gpu,
}

impl DeviceClass {
    pub const ALL: [DeviceClass; 2] = [DeviceClass::CpuOnly, DeviceClass::Gpu];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Battery {
    LowBattery,
    OkBattery,
}

impl Battery {
    pub const ALL: [Battery; 2] = [Battery::LowBattery, Battery::OkBattery];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkState {
    Good,
    Degraded,
    Offline,
}

impl NetworkState {
    pub const ALL: [NetworkState; 3] = [
        NetworkState::Good,
        NetworkState::Degraded,
        NetworkState::Offline,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Edge,
    Cloud,
}

impl Action {
    pub const ALL: [Action; 2] = [Action::Edge, Action::Cloud];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Edge => "edge",
            Action::Cloud => "cloud",
        }
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value for each complexity level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerComplexity<T> {
    pub low: T,
    pub medium: T,
    pub high: T,
}

impl<T: Copy> PerComplexity<T> {
    pub const fn new(low: T, medium: T, high: T) -> Self {
        Self { low, medium, high }
    }

    pub fn get(&self, c: Complexity) -> T {
        match c {
            Complexity::Low => self.low,
            Complexity::Medium => self.medium,
            Complexity::High => self.high,
        }
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> PerComplexity<U> {
        PerComplexity::new(f(self.low), f(self.medium), f(self.high))
    }

    pub fn values(&self) -> [T; 3] {
        [self.low, self.medium, self.high]
    }
}

/// One point of the routing state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoutingState {
    pub complexity: Complexity,
    pub device: DeviceClass,
    pub network: NetworkState,
    pub battery: Battery,
}

impl RoutingState {
    pub const COUNT: usize = 36;

    pub fn new(
        complexity: Complexity,
        device: DeviceClass,
        network: NetworkState,
        battery: Battery,
    ) -> Self {
        Self {
            complexity,
            device,
            network,
            battery,
        }
    }

    /// Dense index in `[0, 36)`; complexity is the slowest-varying field.
    pub fn index(&self) -> usize {
        ((self.complexity as usize * 2 + self.device as usize) * 3 + self.network as usize) * 2
            + self.battery as usize
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < Self::COUNT, "state index {index} out of range");
        let battery = Battery::ALL[index % 2];
        let rest = index / 2;
        let network = NetworkState::ALL[rest % 3];
        let rest = rest / 3;
        let device = DeviceClass::ALL[rest % 2];
        let complexity = Complexity::ALL[rest / 2];
        Self::new(complexity, device, network, battery)
    }

    pub fn all() -> impl Iterator<Item = RoutingState> {
        (0..Self::COUNT).map(Self::from_index)
    }
}
