"""Architecture configuration records."""
import attrs

MASK_TARGETS = ('encoder', 'bottleneck')


@attrs.frozen
class GeneratorConfig:
    frame_len: int = 16384
    enc_channels: int = 512
    enc_kernel: int = 32
    enc_stride: int = 16
    bottleneck_channels: int = 128
    block_hidden: int = 512
    block_kernel: int = 3
    num_tdcn: int = 4
    blocks_per_tdcn: int = 8
    in_eps: float = 1e-5
    # 'encoder': the mask scales the encoder IR; 'bottleneck': it scales the bottleneck features
    mask_target: str = 'encoder'

    @property
    def num_frames(self):
        return (self.frame_len - self.enc_kernel) // self.enc_stride + 1

    @property
    def masked_channels(self):
        return self.enc_channels if self.mask_target == 'encoder' else self.bottleneck_channels

    def dilations(self):
        return [2 ** m for m in range(self.blocks_per_tdcn)]

    def violations(self):
        problems = {}

        def complain(field, message):
            problems.setdefault(field, []).append(message)

        for field in ('frame_len', 'enc_channels', 'enc_kernel', 'enc_stride', 'bottleneck_channels',
                      'block_hidden', 'block_kernel', 'num_tdcn', 'blocks_per_tdcn'):
            if getattr(self, field) < 1:
                complain(field, 'must be >= 1')
        if self.in_eps <= 0:
            complain('in_eps', 'must be > 0')
        if self.block_kernel % 2 == 0:
            complain('block_kernel', 'must be odd so "same" padding is symmetric')
        if self.frame_len < self.enc_kernel:
            complain('frame_len', f'must be >= enc_kernel ({self.enc_kernel})')
        elif (self.frame_len - self.enc_kernel) % max(self.enc_stride, 1):
            complain('frame_len', 'frame_len - enc_kernel must be a multiple of enc_stride '
                                  'so overlap-add restores the exact frame length')
        if self.mask_target not in MASK_TARGETS:
            complain('mask_target', f'must be one of {MASK_TARGETS}')
        return problems


@attrs.frozen
class DiscriminatorConfig:
    channels: tuple = attrs.field(default=(16, 32, 32, 64, 128, 128, 256, 512, 1024), converter=tuple)
    kernel: int = 3
    stride: int = 2
    in_eps: float = 1e-5

    def output_length(self, frame_len):
        length = frame_len
        padding = (self.kernel - 1) // 2
        for _ in self.channels:
            length = (length + 2 * padding - self.kernel) // self.stride + 1
        return length

    def violations(self, frame_len):
        problems = {}
        if not self.channels or any(c < 1 for c in self.channels):
            problems.setdefault('channels', []).append('must be a non-empty list of positive widths')
        if self.kernel < 1 or self.kernel % 2 == 0:
            problems.setdefault('kernel', []).append('must be a positive odd number')
        if self.stride < 1:
            problems.setdefault('stride', []).append('must be >= 1')
        if self.in_eps <= 0:
            problems.setdefault('in_eps', []).append('must be > 0')
        if not problems and self.output_length(frame_len) < 1:
            problems.setdefault('channels', []).append(
                f'{len(self.channels)} stride-{self.stride} layers leave no samples of a {frame_len}-sample frame')
        return problems
