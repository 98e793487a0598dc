package mini;

import javax.crypto.Cipher;
import javax.crypto.spec.SecretKeySpec;

public class StreamCipherNeverFinished {

    /** Prepares an aes stream cipher. */
    public Cipher prepareCipher(byte[] keyBytes) throws Exception {
        SecretKeySpec key = new SecretKeySpec(keyBytes, "AES");
        Cipher cipher = Cipher.getInstance("AES/CBC/PKCS5Padding");
        cipher.init(Cipher.ENCRYPT_MODE, key);
        return cipher;
    }
}
