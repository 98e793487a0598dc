package mini;

import javax.crypto.Cipher;
import javax.crypto.spec.SecretKeySpec;

public class TokenCipherDefaultMode {

    /** Decrypts the token with a raw key. */
    public byte[] decryptToken(byte[] rawKey, byte[] token) throws Exception {
        SecretKeySpec key = new SecretKeySpec(rawKey, "AES");
        Cipher cipher = Cipher.getInstance("AES");
        cipher.init(Cipher.DECRYPT_MODE, key);
        return cipher.doFinal(token);
    }
}
