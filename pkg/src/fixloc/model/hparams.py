from dataclasses import asdict, dataclass, fields

MAX_L_GRID = (10, 15, 20)
MAX_K_GRID = (100, 120, 150, 180, 200)


@dataclass(frozen=True)
class HyperParams:
    d_t: int = 128
    d_p: int = 128
    d_o: int = 128
    d_hidden: int = 128
    max_l: int = 15
    max_k: int = 150
    lr: float = 0.001
    epochs: int = 40
    batch_size: int = 128
    no_token_split: bool = False
    whole_path_embedding: bool = False
    no_fc_layer: bool = False

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.type in ("int", "float", int, float) and not value > 0:
                raise ValueError(f"hyper-parameter {f.name} must be positive, got {value}")

    @property
    def fused_width(self) -> int:
        """Width of the concatenated [V_t; V_p; V_o] operation-path vector."""
        return self.d_t + 2 * self.d_p + self.d_o

    @property
    def encoder_input_width(self) -> int:
        return self.fused_width if self.no_fc_layer else self.d_hidden

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "HyperParams":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in obj.items() if k in known})

    def replace(self, **changes) -> "HyperParams":
        return HyperParams(**{**self.to_dict(), **changes})

    @classmethod
    def toy(cls, width: int = 4, **changes) -> "HyperParams":
        base = dict(d_t=width, d_p=width, d_o=width, d_hidden=width, max_l=6, max_k=150, epochs=1, batch_size=4)
        base.update(changes)
        return cls(**base)
