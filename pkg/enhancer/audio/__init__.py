from enhancer.audio.clip import AudioClip, FrameSet, PairedClip
from enhancer.audio.corpus import load_corpus, save_corpus
from enhancer.audio.dsp import de_emphasis, frame_signal, overlap_add_average, pre_emphasis
from enhancer.audio.mixing import mix_at_snr
from enhancer.audio.synth import synth_corpus
from enhancer.audio.wav import read_wav, write_wav
